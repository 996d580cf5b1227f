#include "esr/bchsh.hpp"
#include "esr/cli.hpp"
#include "esr/error.hpp"
#include "esr/esr_calculus.hpp"
#include "esr/lhv_sim.hpp"
#include "esr/quantum_core.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace esr;

namespace {

std::vector<std::tuple<double, double, double>> entries_of(const OutcomeDistribution& d) {
  std::vector<std::tuple<double, double, double>> out;
  for (const auto& e : d.entries()) out.emplace_back(e.a, e.b, e.probability);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Detection-weighted CHSH analysis for two-qubit Bell experiments";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<ConfigurationError>(m, "ConfigurationError", error.ptr());
  py::register_exception<ZeroProbabilityBranch>(m, "ZeroProbabilityBranch", error.ptr());
  py::register_exception<UndefinedConditional>(m, "UndefinedConditional", error.ptr());

  py::class_<Direction>(m, "Direction")
      .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"), py::arg("z"))
      .def_static("normalized", &Direction::normalized)
      .def_static("in_plane", &Direction::in_plane, py::arg("angle"))
      .def_property_readonly("x", &Direction::x)
      .def_property_readonly("y", &Direction::y)
      .def_property_readonly("z", &Direction::z)
      .def("dot", &Direction::dot)
      .def("__repr__", [](const Direction& d) {
        std::ostringstream os;
        os << "Direction(" << d.x() << ", " << d.y() << ", " << d.z() << ")";
        return os.str();
      });

  py::enum_<Subsystem>(m, "Subsystem")
      .value("first", Subsystem::first)
      .value("second", Subsystem::second);

  py::class_<DensityState>(m, "DensityState")
      .def(py::init<Matrix4, std::string>(), py::arg("matrix"), py::arg("label"))
      .def_property_readonly("matrix", &DensityState::matrix)
      .def_property_readonly("label", &DensityState::label);

  py::class_<ProjectiveObservable>(m, "ProjectiveObservable")
      .def_property_readonly("outcomes", &ProjectiveObservable::outcomes)
      .def_property_readonly("label", &ProjectiveObservable::label)
      .def("projector", &ProjectiveObservable::projector);

  m.def("singlet_state", &singlet_state);
  m.def("spin_observable", &spin_observable, py::arg("direction"), py::arg("subsystem"),
        py::arg("label") = std::string());
  m.def("born_probability", &born_probability);
  m.def("quantum_expectation", &quantum_expectation);
  m.def("quantum_expectation_product", &quantum_expectation_product);

  py::class_<GeneralizedObservable>(m, "GeneralizedObservable")
      .def(py::init<ProjectiveObservable, double>(), py::arg("base"),
           py::arg("no_registration_outcome") = 0.0)
      .def_property_readonly("label", &GeneralizedObservable::label)
      .def("spectrum", &GeneralizedObservable::spectrum);

  py::class_<DetectionModel>(m, "DetectionModel")
      .def(py::init<double>(), py::arg("apparatus_factor") = 1.0)
      .def_static("uniform", &DetectionModel::uniform, py::arg("probability"),
                  py::arg("apparatus_factor") = 1.0)
      .def(
          "set",
          [](DetectionModel& d, const std::string& s, const std::string& o, double p) -> DetectionModel& {
            return d.set(s, o, p);
          },
          py::return_value_policy::reference_internal)
      .def("effective", py::overload_cast<const std::string&, const std::string&>(
                            &DetectionModel::effective, py::const_));

  m.def("sequential_distribution_factored",
        [](const DensityState& s, const GeneralizedObservable& a, const GeneralizedObservable& b,
           const DetectionModel& d) { return entries_of(sequential_distribution_factored(s, a, b, d)); });
  m.def("generalized_correlation", &generalized_correlation);

  py::class_<ChshSetting>(m, "ChshSetting")
      .def(py::init<Direction, Direction, Direction, Direction>())
      .def_static("coplanar_degrees", &ChshSetting::coplanar_degrees)
      .def_static("tsirelson", &ChshSetting::tsirelson)
      .def_readonly("a", &ChshSetting::a)
      .def_readonly("a_prime", &ChshSetting::a_prime)
      .def_readonly("b", &ChshSetting::b)
      .def_readonly("b_prime", &ChshSetting::b_prime);

  py::class_<ChshReport>(m, "ChshReport")
      .def_readonly("e_ab", &ChshReport::e_ab)
      .def_readonly("e_ab_prime", &ChshReport::e_ab_prime)
      .def_readonly("e_a_prime_b", &ChshReport::e_a_prime_b)
      .def_readonly("e_a_prime_b_prime", &ChshReport::e_a_prime_b_prime)
      .def_readonly("standard_lhs", &ChshReport::standard_lhs)
      .def_readonly("modified_lhs", &ChshReport::modified_lhs)
      .def_readonly("detection_probs", &ChshReport::detection_probs)
      .def_readonly("bound", &ChshReport::bound)
      .def_readonly("standard_violated", &ChshReport::standard_violated)
      .def_readonly("modified_violated", &ChshReport::modified_violated);

  m.def("standard_chsh_lhs", &standard_chsh_lhs);
  m.def("modified_chsh_lhs", &modified_chsh_lhs);
  m.def("detection_bound", &detection_bound);
  m.def(
      "min_detection_bound",
      [](double step) {
        const GridPoint g = min_detection_bound(step);
        return py::make_tuple(g.value, g.angles);
      },
      py::arg("step"));
  m.def(
      "optimize_chsh_angles",
      [](const DensityState& s, const DetectionModel& d, const std::string& objective) {
        ChshObjective o;
        if (objective == "standard") {
          o = ChshObjective::standard;
        } else if (objective == "modified") {
          o = ChshObjective::modified;
        } else {
          throw ValidationError("objective must be 'standard' or 'modified'");
        }
        const ChshOptimum r = optimize_chsh_angles(s, d, o);
        return py::make_tuple(r.value, r.angles);
      },
      py::arg("state"), py::arg("detection"), py::arg("objective") = "standard");

  py::class_<MicrostateModel>(m, "MicrostateModel")
      .def_property_readonly("name", &MicrostateModel::name);
  m.def("gisin_gisin_model", &gisin_gisin_model);
  m.def("sign_sign_model", &sign_sign_model);
  m.def("model_by_name", &model_by_name);

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("value", &Estimate::value)
      .def_readonly("std_error", &Estimate::std_error);
  py::class_<FairSamplingResult>(m, "FairSamplingResult")
      .def_readonly("all_sample_freq", &FairSamplingResult::all_sample_freq)
      .def_readonly("detected_freq", &FairSamplingResult::detected_freq)
      .def_readonly("divergence", &FairSamplingResult::divergence)
      .def_readonly("std_error", &FairSamplingResult::std_error);

  m.def("micro_chsh", &micro_chsh, py::arg("model"), py::arg("setting"), py::arg("n_trials"),
        py::arg("seed"), py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());
  m.def("fair_sampling_check", &fair_sampling_check, py::arg("model"), py::arg("a"), py::arg("b"),
        py::arg("n_trials"), py::arg("seed"), py::arg("workers") = 1,
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the esr-bell command line; returns (exit_code, stdout, stderr).");
}
