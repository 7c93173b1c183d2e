#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vrm/covering.hpp"
#include "vrm/diagnostics.hpp"
#include "vrm/errors.hpp"
#include "vrm/io.hpp"
#include "vrm/matching.hpp"
#include "vrm/run.hpp"

namespace py = pybind11;
using namespace vrm;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// input_dim 0 marks a purely geometric set: every coordinate is an input.
SampleSet to_samples(const Array& a, std::size_t input_dim) {
  if (a.ndim() != 2) throw PreconditionError("2-d array", "expected shape (N, K)");
  const auto n = static_cast<std::size_t>(a.shape(0)), k = static_cast<std::size_t>(a.shape(1));
  return SampleSet(k, input_dim == 0 ? k : input_dim, std::vector<double>(a.data(), a.data() + n * k));
}

Array to_array(const SampleSet& s) {
  Array out({s.size(), s.dim()});
  std::copy(s.data().begin(), s.data().end(), out.mutable_data());
  return out;
}

Json parse(const std::string& text) { return Json::parse(text); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Vicinal risk minimization library";
  m.attr("__version__") = kVersion;

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_NotImplementedError);

  m.def("sample", [](const std::string& dist, std::size_t n, std::uint64_t seed) {
    return to_array(sample(distribution_from_json(parse(dist)), n, seed));
  }, py::arg("distribution"), py::arg("n"), py::arg("seed"));

  m.def("match", [](const Array& z, const Array& ghost) {
    const MatchResult r = vicinity_ghost_match(to_samples(z, 0), to_samples(ghost, 0));
    return py::make_tuple(r.permutation, r.total_cost);
  }, py::arg("z"), py::arg("ghost"), "Optimal pairing; returns (permutation, total cost).");

  m.def("empirical_cdf_distance", [](const Array& z, std::vector<double> t1, std::vector<double> t2) {
    return empirical_cdf_distance(EmpiricalCdf(to_samples(z, 0)), t1, t2);
  }, py::arg("z"), py::arg("t1"), py::arg("t2"));

  m.def("vicinal_risk", [](const std::string& hypothesis, const std::string& loss, const Array& z,
                           std::size_t input_dim, const std::string& vicinity, std::size_t m, std::uint64_t seed) {
    const LossFunction f(hypothesis_from_json(parse(hypothesis)), loss_from_json(parse(loss)));
    const Estimate e = vicinal_risk(f, to_samples(z, input_dim), vicinity_from_json(parse(vicinity)), m, seed);
    return py::make_tuple(e.value, e.std_error);
  }, py::arg("hypothesis"), py::arg("loss"), py::arg("z"), py::arg("input_dim"), py::arg("vicinity"),
     py::arg("m"), py::arg("seed"), "Returns (value, standard error).");

  m.def("empirical_risk", [](const std::string& hypothesis, const std::string& loss, const Array& z,
                             std::size_t input_dim) {
    const LossFunction f(hypothesis_from_json(parse(hypothesis)), loss_from_json(parse(loss)));
    return empirical_risk(f, to_samples(z, input_dim));
  }, py::arg("hypothesis"), py::arg("loss"), py::arg("z"), py::arg("input_dim"));

  m.def("covering_number", [](const Array& matrix, double xi, const std::string& method) {
    if (matrix.ndim() != 2) throw PreconditionError("2-d array", "expected shape (rows, cols)");
    const auto rows = static_cast<std::size_t>(matrix.shape(0)), cols = static_cast<std::size_t>(matrix.shape(1));
    const EvaluationMatrix e(rows, cols, std::vector<double>(matrix.data(), matrix.data() + rows * cols));
    if (method != "exact" && method != "greedy") throw PreconditionError("method is exact or greedy", method);
    return covering_number(e, xi, method == "exact" ? CoverMethod::exact : CoverMethod::greedy).centers;
  }, py::arg("matrix"), py::arg("xi"), py::arg("method") = "exact", "Indices of the cover's centre rows.");

  m.def("hoeffding_one_sided", [](double xi, std::vector<double> means, std::vector<std::pair<double, double>> ranges) {
    return hoeffding_one_sided(xi, means, ranges);
  }, py::arg("xi"), py::arg("means"), py::arg("ranges"));

  m.def("cover_bound_rhs", &cover_bound_rhs, py::arg("omega"), py::arg("expected_covering"), py::arg("n"), py::arg("t"),
        py::arg("a"), py::arg("b"), py::arg("range_exponent") = 1, py::arg("xi") = py::none());

  m.def("uen_bound_rhs", &uen_bound_rhs, py::arg("omega"), py::arg("uen_within_r"), py::arg("uen_unconstrained"),
        py::arg("n"), py::arg("t"), py::arg("a"), py::arg("b"), py::arg("r"), py::arg("dim"), py::arg("c") = 2.0,
        py::arg("xi") = py::none());

  m.def("run", [](const std::string& config) {
    RunOutcome r;
    {
      py::gil_scoped_release release;
      try {
        r = run(config_from_json(parse(config)));
      } catch (const ConfigError& e) {
        r.exit_code = kExitConfig;
        r.error = Json{{"error", "config"}, {"message", e.what()}}.dump();
      }
    }
    std::vector<std::string> files;
    for (const auto& f : r.files) files.push_back(f.string());
    py::list failed;
    for (const auto& a : r.assertions)
      if (!a.passed) failed.append(a.name);
    return py::make_tuple(r.exit_code, files, r.error, failed);
  }, py::arg("config"), "Runs an experiment; returns (exit code, files, error json, failed assertions).");
}
