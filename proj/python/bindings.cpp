#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gmratio/bounds.hpp"
#include "gmratio/error.hpp"
#include "gmratio/moments.hpp"
#include "gmratio/sampling.hpp"
#include "gmratio/special_fns.hpp"
#include "gmratio/weights.hpp"

namespace py = pybind11;
using namespace gmratio;

namespace {

py::dict certificate_dict(const BoundCertificate& c) {
  py::dict d;
  d["n"] = c.n;
  d["s_upper"] = c.s_upper;
  d["s_lower"] = c.s_lower;
  d["n_min"] = c.n_min;
  d["n_min_upper"] = c.n_min_upper;
  d["n_min_lower"] = c.n_min_lower;
  d["upper_threshold"] = c.upper_threshold;
  d["lower_threshold"] = c.lower_threshold;
  d["probability_floor"] = c.probability_floor;
  d["predicted_center"] = c.predicted_center;
  d["theorem_matching"] = c.theorem_matching;
  return d;
}

Sphere make_sphere(const py::object& sphere) {
  if (py::isinstance<py::int_>(sphere)) return EuclideanSphere{sphere.cast<std::int64_t>()};
  return sphere.cast<WeightSequence>();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact moments, Chebyshev bounds and sampling for the GM/AM ratio";

  py::register_exception<OptimizationFailure>(m, "OptimizationFailure", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ConstructionError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("log_gamma", &log_gamma, py::arg("z"));
  m.def("digamma", &digamma, py::arg("z"));
  m.def("stirling_remainder", &stirling_remainder, py::arg("z"));
  m.def("exp_neg_gamma", &exp_neg_gamma);
  m.def("euclidean_center", &euclidean_center);

  py::class_<WeightSequence>(m, "WeightSequence")
      .def(py::init([](std::vector<double> a) { return WeightSequence(std::move(a)); }), py::arg("a"))
      .def_property_readonly("n", &WeightSequence::n)
      .def_property_readonly("values", [](const WeightSequence& w) {
        return std::vector<double>(w.values().begin(), w.values().end());
      })
      .def_property_readonly("family", [](const WeightSequence& w) { return family_name(w.family()); })
      .def("max", &WeightSequence::max)
      .def("__len__", &WeightSequence::n)
      .def("__repr__", [](const WeightSequence& w) {
        return "<WeightSequence " + family_name(w.family()) + " n=" + std::to_string(w.n()) + ">";
      });

  m.def("equal_weights", &equal_weights, py::arg("n"));
  m.def("two_level_weights", &two_level_weights, py::arg("n"), py::arg("m"));
  m.def(
      "make_weights", [](const std::string& family, std::int64_t n) { return make_weights(parse_family(family), n); },
      py::arg("family"), py::arg("n"));
  m.def(
      "validate",
      [](const WeightSequence& w) {
        py::list out;
        for (const auto& v : validate(w)) out.append(py::make_tuple(v.index, v.message));
        return out;
      },
      py::arg("weights"));
  m.def(
      "weight_stats",
      [](const WeightSequence& w) {
        const auto st = weight_stats(w);
        py::dict d;
        d["a_max"] = st.a_max;
        d["log_weight_gm"] = st.log_weight_gm;
        d["predicted_center"] = st.predicted_center;
        return d;
      },
      py::arg("weights"));

  m.def(
      "exact_moment_weighted",
      [](const WeightSequence& w, double s) {
        const auto r = exact_moment_weighted(w, s);
        return py::make_tuple(r.log_moment, r.normalized_root);
      },
      py::arg("weights"), py::arg("s"));
  m.def(
      "exact_moment_euclidean",
      [](std::int64_t n, double s) {
        const auto r = exact_moment_euclidean(n, s);
        return py::make_tuple(r.log_moment, r.normalized_root);
      },
      py::arg("n"), py::arg("s"));

  m.def("chebyshev_level", &chebyshev_level, py::arg("weights"), py::arg("s"), py::arg("k"));
  m.def(
      "factor_decomposition",
      [](const WeightSequence& w, double s, double k) {
        const auto f = factor_decomposition(w, s, k);
        py::dict d;
        d["prefactor"] = f.prefactor;
        d["gamma_ratio_factor"] = f.gamma_ratio_factor;
        d["product_factor"] = f.product_factor;
        d["gamma_ratio_bound"] = f.gamma_ratio_bound;
        d["product"] = f.product();
        return d;
      },
      py::arg("weights"), py::arg("s"), py::arg("k"));
  m.def(
      "certified_interval",
      [](const WeightSequence& w, double k, double epsilon, std::int64_t n) {
        return certificate_dict(certified_interval(BoundQuery{w, k, epsilon}, n));
      },
      py::arg("weights"), py::arg("k"), py::arg("epsilon"), py::arg("n") = 0);
  m.def(
      "product_power", [](const std::vector<double>& t) { return product_power(t); }, py::arg("t"));

  m.def(
      "simulate",
      [](const py::object& sphere, std::uint64_t samples, std::uint64_t seed,
         const std::vector<std::pair<double, double>>& intervals) {
        Simulation sim{make_sphere(sphere), samples, seed, {}};
        for (const auto& [lo, hi] : intervals) sim.intervals.push_back(Interval{lo, hi});
        SimulationOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = run_experiment(sim);
        }
        if (!outcome.complete) throw std::runtime_error(outcome.error);
        const auto& st = outcome.state;
        py::dict d;
        d["count"] = st.count();
        d["mean"] = st.mean();
        d["sd"] = st.standard_deviation();
        d["median"] = st.median();
        py::list probs;
        for (std::size_t i = 0; i < sim.intervals.size(); ++i) probs.append(st.interval_probability(i));
        d["interval_probabilities"] = probs;
        return d;
      },
      py::arg("sphere"), py::arg("samples"), py::arg("seed") = 0x5EED,
      py::arg("intervals") = std::vector<std::pair<double, double>>{},
      "Monte Carlo GM/AM statistics. `sphere` is a WeightSequence or an int n for the Euclidean sphere.");
}
