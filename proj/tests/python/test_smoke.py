import json
import math

import numpy as np
import pytest

import vicinal

TASK = {"kind": "linear_regression", "w_star": [1.0], "bias": 0.0, "noise_sigma": 0.1, "x_lo": -1.0, "x_hi": 1.0}
LOSS = {"kind": "squared", "lower": 0.0, "upper": 1.0}


def test_sample_is_deterministic():
    a = vicinal.sample(TASK, 20, 3)
    b = vicinal.sample(TASK, 20, 3)
    assert a.shape == (20, 2)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, vicinal.sample(TASK, 20, 4))


def test_match_swaps_two_points():
    perm, cost = vicinal.match(np.array([[0.0], [10.0]]), np.array([[9.0], [1.0]]))
    assert perm == [1, 0]
    assert cost == pytest.approx(2.0)


def test_dirac_vicinal_risk_equals_empirical_risk():
    z = vicinal.sample(TASK, 50, 1)
    h = {"kind": "linear", "weights": [0.7], "bias": 0.1}
    value, se = vicinal.vicinal_risk(h, LOSS, z, 1, {"kind": "dirac"}, 8, 2)
    assert value == vicinal.empirical_risk(h, LOSS, z, 1)
    assert se == 0.0


def test_gaussian_vicinal_risk_adds_the_ridge_penalty():
    z = vicinal.sample(TASK, 100, 1)
    w, sigma = 0.8, 0.2
    h = {"kind": "linear", "weights": [w], "bias": 0.0}
    wide = {"kind": "squared", "lower": 0.0, "upper": 1e9}
    value, se = vicinal.vicinal_risk(h, wide, z, 1, {"kind": "gaussian", "sigma": sigma}, 4000, 3)
    expected = np.mean((w * z[:, 0] - z[:, 1]) ** 2) + sigma**2 * w**2
    assert abs(value - expected) <= 4 * se


def test_covering_number():
    assert vicinal.covering_number(np.array([[0.0, 0.0], [0.5, 0.5]]), 0.3) == [0, 1]
    assert len(vicinal.covering_number(np.array([[0.0, 0.0], [0.5, 0.5]]), 0.6)) == 1


def test_bounds():
    assert vicinal.cover_bound_rhs(-0.02, 8.0, 512, 0.1, 0.0, 1.0) == pytest.approx(
        -0.08 + math.sqrt(32 * (math.log(8) - math.log(0.05)) / 512)
    )
    assert vicinal.hoeffding_one_sided(0.4, [0.1, 0.3], [(0.0, 1.0), (0.0, 1.0)]) == 1.0
    with pytest.raises(vicinal.PreconditionError):
        vicinal.cover_bound_rhs(0.0, 8.0, 512, 1.5, 0.0, 1.0)


def test_run_and_config_errors(tmp_path):
    code, files, error, failed = vicinal.run(
        {"experiment": "dkw", "trials": 100, "n_grid": [10, 20], "out": str(tmp_path / "dkw")}
    )
    assert code == 0, error
    assert failed == []
    assert any(f.endswith("dkw.csv") for f in files)
    summary = json.loads((tmp_path / "dkw" / "summary.json").read_text())
    assert summary["experiment"] == "dkw"

    code, _, error, _ = vicinal.run({"bogus": 1})
    assert code == 2
    assert json.loads(error)["error"] == "config"
