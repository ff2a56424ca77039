#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "entwit/certificates.hpp"
#include "entwit/classical.hpp"
#include "entwit/decomp.hpp"
#include "entwit/error.hpp"
#include "entwit/io.hpp"
#include "entwit/polsim.hpp"
#include "entwit/qopt.hpp"
#include "entwit/tomo.hpp"

namespace py = pybind11;
using namespace entwit;

namespace {

py::object to_py(const io::Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

WitnessSpec witness_arg(const py::object& w) {
  if (py::isinstance<py::str>(w)) {
    const auto name = w.cast<std::string>();
    return name == "C3" ? c3_witness() : canonical_witness(name);
  }
  if (py::isinstance<WitnessSpec>(w)) return w.cast<WitnessSpec>();
  return WitnessSpec(w.cast<RMatrix>());
}

std::vector<DensityMatrix> densities(const std::vector<CMatrix>& ms) {
  std::vector<DensityMatrix> out;
  for (const auto& m : ms) out.emplace_back(m);
  return out;
}

std::vector<Measurement> observables(const std::vector<CMatrix>& ms) {
  std::vector<Measurement> out;
  for (const auto& m : ms) out.push_back(Measurement::from_operator(m));
  return out;
}

py::dict quantum_minimum(const QuantumMinimum& q) {
  py::dict d;
  d["bits"] = q.bits;
  d["residual"] = q.residual;
  d["starts_converged"] = q.starts_converged;
  d["states"] = q.ensemble.matrices();
  std::vector<CMatrix> ms;
  for (const auto& m : q.measurements) ms.push_back(m.op());
  d["measurements"] = ms;
  return d;
}

}  // namespace

PYBIND11_MODULE(_entwit, m) {
  m.doc() = "Classical and quantum entropy minima of linear dimension witnesses";
  m.attr("__version__") = ENTWIT_VERSION;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<InvalidDistribution>(m, "InvalidDistribution", base.ptr());
  py::register_exception<InvalidState>(m, "InvalidState", base.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
  py::register_exception<Infeasible>(m, "Infeasible", base.ptr());
  py::register_exception<GuardExceeded>(m, "GuardExceeded", base.ptr());
  py::register_exception<NonConvergence>(m, "NonConvergence", base.ptr());

  py::class_<WitnessSpec>(m, "WitnessSpec")
      .def(py::init<RMatrix, std::string>(), py::arg("alpha"), py::arg("name") = "")
      .def_static("canonical", &canonical_witness, py::arg("name"))
      .def_property_readonly("n", &WitnessSpec::n)
      .def_property_readonly("l", &WitnessSpec::l)
      .def_property_readonly("alpha", &WitnessSpec::alpha)
      .def_property_readonly("name", &WitnessSpec::name)
      .def("__repr__", [](const WitnessSpec& w) { return "WitnessSpec(" + io::to_json(w).dump() + ")"; });

  py::class_<OptimizationConfig>(m, "OptimizationConfig")
      .def(py::init<>())
      .def_readwrite("starts", &OptimizationConfig::starts)
      .def_readwrite("max_iters", &OptimizationConfig::max_iters)
      .def_readwrite("penalty_schedule", &OptimizationConfig::penalty_schedule)
      .def_readwrite("objective_tol", &OptimizationConfig::objective_tol)
      .def_readwrite("constraint_tol", &OptimizationConfig::constraint_tol)
      .def_readwrite("seed", &OptimizationConfig::seed);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("pair_rate", &SimConfig::pair_rate)
      .def_readwrite("duration_per_setting", &SimConfig::duration_per_setting)
      .def_readwrite("angle_jitter_deg", &SimConfig::angle_jitter_deg)
      .def_readwrite("dark_rate", &SimConfig::dark_rate)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("exact", &SimConfig::exact);

  m.def("von_neumann_entropy", [](const CMatrix& rho) { return von_neumann_entropy(DensityMatrix(rho)); });
  m.def("shannon_entropy", [](const std::vector<double>& p) { return shannon_entropy(ProbVector(p)); });

  m.def("eigen_sum_bound", [](const std::vector<CMatrix>& states, const py::object& w) {
    return eigen_sum_bound(QuantumEnsemble(densities(states)), witness_arg(w));
  });
  m.def("quantum_value", [](const std::vector<CMatrix>& states, const std::vector<CMatrix>& meas, const py::object& w) {
    return quantum_value(QuantumEnsemble(densities(states)), observables(meas), witness_arg(w));
  });

  m.def("classical_bound", [](const py::object& w, int d) { return classical_bound(witness_arg(w), d); },
        py::arg("witness"), py::arg("d"));
  m.def("classical_bounds", [](const py::object& w) { return classical_bounds(witness_arg(w)).L; });
  m.def("min_classical_entropy", [](const py::object& w, double W) {
    const ClassicalMinimum c = min_classical_entropy(witness_arg(w), W);
    py::dict d;
    d["bits"] = c.bits;
    d["witness"] = c.witness;
    d["mixture"] = to_py(io::to_json(c.mixture));
    return d;
  });

  m.def("quantum_max", [](const py::object& w, const OptimizationConfig& cfg) { return quantum_max(witness_arg(w), cfg); },
        py::arg("witness"), py::arg("config") = OptimizationConfig{});
  m.def("min_quantum_entropy",
        [](const py::object& w, double W, const OptimizationConfig& cfg) {
          return quantum_minimum(min_quantum_entropy(witness_arg(w), W, cfg));
        },
        py::arg("witness"), py::arg("W"), py::arg("config") = OptimizationConfig{});
  m.def("entropy_curve",
        [](const py::object& w, const std::string& kind, const std::vector<double>& grid, const OptimizationConfig& cfg) {
          if (kind != "classical" && kind != "quantum") throw InvalidArgument("kind must be classical or quantum");
          const CurveKind k = kind == "classical" ? CurveKind::classical : CurveKind::quantum;
          return to_py(io::to_json(entropy_curve(witness_arg(w), k, grid, cfg)));
        },
        py::arg("witness"), py::arg("kind"), py::arg("grid"), py::arg("config") = OptimizationConfig{});
  m.def("gap_report",
        [](const py::object& w, double W, const OptimizationConfig& cfg) {
          return to_py(io::to_json(gap_report(witness_arg(w), W, cfg)));
        },
        py::arg("witness"), py::arg("W"), py::arg("config") = OptimizationConfig{});

  m.def("rank1_decompose", [](const CMatrix& rho, const CMatrix& M) {
    const SplitResult r = rank1_decompose(DensityMatrix(rho), HermitianOp(M));
    py::dict d = to_py(io::to_json(r)).cast<py::dict>();
    d["reconstruction"] = r.reconstruct();
    return d;
  });
  m.def("reduce_ensemble", [](const std::vector<CMatrix>& states, const std::vector<CMatrix>& meas, const py::object& w) {
    const ReducedEnsemble r = reduce_ensemble(QuantumEnsemble(densities(states)), observables(meas), witness_arg(w));
    py::dict d;
    d["states"] = r.reduced.matrices();
    d["lifted"] = r.lifted.matrices();
    d["choice"] = r.choice;
    d["witness_before"] = r.witness_before;
    d["witness_after"] = r.witness_after;
    d["entropy_before"] = r.entropy_before;
    d["entropy_after"] = r.entropy_after;
    return d;
  });

  m.def("run_protocol",
        [](const std::string& c, const std::string& mode, const SimConfig& cfg) {
          return to_py(io::to_json(run_protocol(parse_case(c), parse_mode(mode), cfg)));
        },
        py::arg("case"), py::arg("mode"), py::arg("config") = SimConfig{});
  m.def("error_budget",
        [](const std::string& c, const std::string& mode, const SimConfig& cfg, int trials) {
          return to_py(io::to_json(error_budget(parse_case(c), parse_mode(mode), cfg, trials)));
        },
        py::arg("case"), py::arg("mode"), py::arg("config") = SimConfig{}, py::arg("trials") = 20);

  m.def("tomography_reconstruct", [](const std::vector<double>& counts, int s) {
    if (s != 3 && s != 4) throw InvalidArgument("s must be 3 or 4");
    const TomographySettings ts = tomo_settings(s == 3 ? TomoCase::I3 : TomoCase::I4R4);
    py::dict d;
    d["linear"] = linear_reconstruct(counts, ts);
    d["mle"] = mle_repair(counts, ts).matrix();
    return d;
  });
  m.def("fidelity", [](const CMatrix& a, const CMatrix& b) { return fidelity(DensityMatrix(a), DensityMatrix(b)); });

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
