#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ricciot/coupling.hpp"
#include "ricciot/costs.hpp"
#include "ricciot/diffusion.hpp"
#include "ricciot/errors.hpp"
#include "ricciot/geometry.hpp"
#include "ricciot/harness.hpp"
#include "ricciot/lflow.hpp"
#include "ricciot/transport.hpp"

namespace py = pybind11;
using namespace ricciot;

namespace {

using Pair = std::pair<double, double>;

SamplePoint pt(const Pair& p) { return {p.first, p.second}; }

DiscreteMeasure measure(const std::vector<double>& w) {
  DiscreteMeasure m;
  m.weights = w;
  return m;
}

py::dict cloud_dict(const PointCloud& c) {
  std::vector<Pair> pts;
  for (const auto& p : c.points) pts.emplace_back(p.p, p.q);
  py::dict d;
  d["model"] = to_string(c.model);
  d["points"] = pts;
  d["weights"] = c.weights;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Monotonicity of transport costs under super Ricci flows on model geometries";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<CutLocusError>(m, "CutLocusError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<ResolutionError>(m, "ResolutionError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::enum_<Model>(m, "Model").value("Sphere2", Model::Sphere2).value("Torus2", Model::Torus2);

  py::class_<ScaleFlow>(m, "ScaleFlow")
      .def_static(
          "backward_ricci",
          [](Model model, double c0, double K, Pair domain, bool declared) {
            return ScaleFlow::backward_ricci(model, c0, K, {domain.first, domain.second}, declared);
          },
          py::arg("model"), py::arg("c0") = 1.0, py::arg("K") = 0.0, py::arg("domain") = Pair{0.0, 1.0},
          py::arg("declared_super_ricci") = true)
      .def_static("user_scale", &ScaleFlow::user_scale, py::arg("model"), py::arg("tau"), py::arg("scale"),
                  py::arg("K") = 0.0, py::arg("declared_super_ricci") = true)
      .def_property_readonly("model", &ScaleFlow::model)
      .def_property_readonly("K", &ScaleFlow::K)
      .def_property_readonly("domain", [](const ScaleFlow& f) { return Pair{f.domain().lo, f.domain().hi}; })
      .def("scale", [](const ScaleFlow& f, double tau) { return metric_scale(f, tau); })
      .def("scale_derivative", &ScaleFlow::scale_derivative)
      .def("scalar_curvature", &ScaleFlow::scalar_curvature);

  m.def("distance", [](const ScaleFlow& f, double tau, Pair x, Pair y) { return distance(f, tau, pt(x), pt(y)); });
  m.def("make_cloud", [](Model model, int n) { return cloud_dict(make_cloud(model, n)); });

  py::class_<CostFunction>(m, "CostFunction")
      .def_property_readonly("name", &CostFunction::name)
      .def("eta", &CostFunction::eta)
      .def("eta_s", &CostFunction::eta_s)
      .def("eta_ss", &CostFunction::eta_ss)
      .def("eta_tau", &CostFunction::eta_tau);
  m.def("power_cost", &power_cost, py::arg("p"), py::arg("K") = 0.0);
  m.def("admissible", [](const CostFunction& c, double K, const std::vector<double>& s, const std::vector<double>& tau) {
    return admissibility_check(c, K, s, tau).pass;
  });

  m.def(
      "solve_exact",
      [](const CostMatrix& C, const std::vector<double>& mu, const std::vector<double>& nu) {
        const ExactSolution s = solve_exact(C, measure(mu), measure(nu));
        CostMatrix plan = CostMatrix::Zero(C.rows(), C.cols());
        for (const auto& c : s.plan.couplings) plan(c.i, c.j) += c.mass;
        py::dict d;
        d["value"] = s.value;
        d["dual_value"] = s.dual_value;
        d["plan"] = plan;
        d["phi"] = s.potentials.phi;
        d["psi"] = s.potentials.psi;
        return d;
      },
      py::arg("C"), py::arg("mu"), py::arg("nu"));
  m.def(
      "solve_entropic",
      [](const CostMatrix& C, const std::vector<double>& mu, const std::vector<double>& nu, double eps,
         std::size_t max_iters) {
        const EntropicSolution s = solve_entropic(C, measure(mu), measure(nu), eps, max_iters);
        py::dict d;
        d["value"] = s.value;
        d["converged"] = s.converged;
        d["iterations"] = s.iterations;
        d["marginal_error"] = s.marginal_error;
        return d;
      },
      py::arg("C"), py::arg("mu"), py::arg("nu"), py::arg("eps"), py::arg("max_iters") = 10000);

  m.def("lemma_gap", [](const ScaleFlow& f, double tau, const CostFunction& c, Pair x, Pair y) {
    return lemma_gap(f, tau, c, make_pair(f, tau, pt(x), pt(y)));
  });

  m.def("l_distance", [](const ScaleFlow& f, Pair x, double t1, Pair y, double t2) {
    return l_distance(f, pt(x), t1, pt(y), t2);
  });
  m.def("q_kernel", [](const ScaleFlow& f, double t1, double t2, double D) { return QKernel(f, t1, t2)(D); });
  m.def("theta_from_v", &theta_from_v);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("exit_code", &RunResult::exit_code)
      .def_readonly("verdict", &RunResult::verdict)
      .def_readonly("csv_path", &RunResult::csv_path)
      .def_readonly("verdict_path", &RunResult::verdict_path)
      .def_readonly("summary", &RunResult::summary);
  m.def(
      "run_config",
      [](const std::string& yaml_text, const std::string& out_dir) {
        py::gil_scoped_release release;
        return run(parse_config(yaml_text), out_dir);
      },
      py::arg("yaml_text"), py::arg("out_dir"));
}
