"""Vicinal risk minimization: sampling, matching, vicinal risks, covers and bounds."""

import json

from . import _core
from ._core import (
    ConfigError,
    PreconditionError,
    UnsupportedError,
    __version__,
    uen_bound_rhs,
    covering_number,
    hoeffding_one_sided,
    match,
    cover_bound_rhs,
)

__all__ = [
    "ConfigError",
    "PreconditionError",
    "UnsupportedError",
    "__version__",
    "uen_bound_rhs",
    "covering_number",
    "empirical_cdf_distance",
    "empirical_risk",
    "hoeffding_one_sided",
    "match",
    "run",
    "sample",
    "cover_bound_rhs",
    "vicinal_risk",
]


def sample(distribution, n, seed):
    """Draw n points from a distribution given as a config dict; returns an (n, K) array."""
    return _core.sample(json.dumps(distribution), n, seed)


def empirical_cdf_distance(z, t1, t2):
    return _core.empirical_cdf_distance(z, list(t1), list(t2))


def empirical_risk(hypothesis, loss, z, input_dim):
    return _core.empirical_risk(json.dumps(hypothesis), json.dumps(loss), z, input_dim)


def vicinal_risk(hypothesis, loss, z, input_dim, vicinity, m=256, seed=0):
    """Monte-Carlo vicinal risk; returns (value, standard error)."""
    return _core.vicinal_risk(json.dumps(hypothesis), json.dumps(loss), z, input_dim, json.dumps(vicinity), m, seed)


def run(config):
    """Run an experiment from a config dict; returns (exit code, files, error json, failed assertions)."""
    return _core.run(json.dumps(config))
