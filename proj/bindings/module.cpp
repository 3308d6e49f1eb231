#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sandwich/config.hpp"
#include "sandwich/kernels.hpp"
#include "sandwich/safety_filter.hpp"
#include "sandwich/scenario.hpp"
#include "sandwich/special_functions.hpp"

namespace py = pybind11;
using namespace sandwich;

namespace {

ScenarioConfig load_config(const std::string& path, const std::string& mode, double horizon,
                           int nx, double dt, const std::string& out_dir) {
  ScenarioConfig cfg = parse_config(path);
  if (!mode.empty()) cfg.mode = run_mode_from_string(mode);
  if (horizon > 0.0) cfg.horizon = horizon;
  if (nx > 0) cfg.grid.nx = nx;
  if (dt > 0.0) cfg.grid.dt = dt;
  cfg.out_dir = out_dir;  // empty by default: no files from python unless asked
  return cfg;
}

py::dict run_result_dict(const RunResult& res) {
  py::dict d;
  d["norm0"] = res.norm0;
  d["norm_final"] = res.norm_final;
  d["norm_max"] = res.norm_max;
  d["t_f"] = res.t_f;
  d["diverged"] = res.diverged;
  d["fault"] = res.fault;
  d["fault_message"] = res.fault_message;
  d["sigma0"] = res.sigma0;
  d["min_y1"] = res.margins.min_y1;
  d["theta_hat"] = py::make_tuple(res.theta_hat_final.d1, res.theta_hat_final.d2,
                                  res.theta_hat_final.b);
  d["summary"] = res.summary_text;
  std::vector<double> t, y1, ud, ua;
  t.reserve(res.rows.size());
  for (const TraceRow& r : res.rows) {
    t.push_back(r.t);
    y1.push_back(r.Y(0));
    ud.push_back(r.Ud);
    ua.push_back(r.Ua);
  }
  d["t"] = std::move(t);
  d["y1"] = std::move(y1);
  d["Ud"] = std::move(ud);
  d["Ua"] = std::move(ua);
  d["V_series"] = res.V_series;
  return d;
}

}  // namespace

PYBIND11_MODULE(sandwich_control, m) {
  m.doc() = "simulator and safe boundary control for ODE-PDE-ODE transport cascades";

  m.def("bessel_i", &bessel_I, py::arg("order"), py::arg("x"),
        "modified Bessel function of the first kind (order 0 or 1)");
  m.def("pi_function", &pi_function, py::arg("s1"), py::arg("s2"),
        "the Marcum-type Pi special function used by the kernel closed forms");
  m.def(
      "kernel_fh",
      [](double x, double y, double q1, double q2, double p, double d1, double d2) {
        const KernelPoint k = kernel_FH(x, y, q1, q2, p, d1, d2);
        return py::make_tuple(k.F, k.H);
      },
      py::arg("x"), py::arg("y"), py::arg("q1"), py::arg("q2"), py::arg("p"), py::arg("d1"),
      py::arg("d2"), "closed-form transport kernels (F, H) at a triangle point");
  m.def(
      "gain_vector",
      [](const Eigen::VectorXd& l, double b, const Eigen::VectorXd& kappas) {
        const Eigen::RowVectorXd K = gain_vector_K(l, b, kappas);
        return Eigen::VectorXd(K.transpose());
      },
      py::arg("l"), py::arg("b"), py::arg("kappas"),
      "distal gain row from the companion last row and the chain rates");
  m.def(
      "qp_filter",
      [](double u_desired, double c_max) {
        SafeActionBound bound;
        bound.c_max = c_max;
        return qp_filter(u_desired, bound);
      },
      py::arg("u_desired"), py::arg("c_max"),
      "projection of the desired input onto the safe half-line");

  m.def(
      "simulate",
      [](const std::string& path, const std::string& mode, double horizon, int nx, double dt,
         const std::string& out_dir) {
        return run_result_dict(run_scenario(load_config(path, mode, horizon, nx, dt, out_dir)));
      },
      py::arg("config"), py::arg("mode") = "", py::arg("horizon") = 0.0, py::arg("nx") = 0,
      py::arg("dt") = 0.0, py::arg("out_dir") = "",
      "run one configured scenario and return the scalar traces");
  m.def(
      "refine",
      [](const std::string& path, int levels, const std::string& mode) {
        ScenarioConfig cfg = load_config(path, mode, 0.0, 0, 0.0, "");
        const RefinementStudy study = refinement_study(cfg, levels);
        py::list rows;
        for (const RefinementLevel& l : study.levels) {
          py::dict d;
          d["nx"] = l.nx;
          d["dt"] = l.dt;
          d["diff_y1"] = l.diff_y1;
          d["order"] = l.order;
          rows.append(d);
        }
        return rows;
      },
      py::arg("config"), py::arg("levels") = 3, py::arg("mode") = "",
      "successive grid refinement of a configured scenario");
  m.def(
      "validate",
      [](const std::string& path) {
        const ScenarioConfig cfg = parse_config(path);
        PlantState s = cfg.initial_state();
        double gamma0 = std::numeric_limits<double>::quiet_NaN();
        if (cfg.mode != RunMode::OpenLoop) {
          ContextCache cache(cfg.plant, cfg.gains, cfg.grid.nx, cfg.kernel_refine);
          PlantState c = s;
          enforce_boundary_compatibility(c, cfg.plant);
          gamma0 = gamma_derivs(c, cache.get(cfg.plant.theta()), 0)[0];
        }
        const ValidationReport rep = validate(cfg.plant, s, cfg.grid, gamma0);
        py::dict d;
        d["cfl_ok"] = rep.cfl_ok;
        d["assumption1_ok"] = rep.assumption1_ok;
        d["assumption2_ok"] = rep.assumption2_ok;
        d["assumption3_ok"] = rep.assumption3_ok;
        d["assumption4_ok"] = rep.assumption4_ok;
        d["boundary_compatible"] = rep.boundary_compatible;
        d["all_ok"] = rep.all_ok();
        d["messages"] = rep.messages;
        return d;
      },
      py::arg("config"), "check the configuration and model assumptions");
}
