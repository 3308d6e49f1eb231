#include "sandwich/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sandwich/quadrature.hpp"

namespace sandwich {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double energy_norm(const PlantState& s) {
  const double h = 1.0 / static_cast<double>(s.z.size() - 1);
  return trapezoid(Eigen::VectorXd(s.z.cwiseProduct(s.z)), h) +
         trapezoid(Eigen::VectorXd(s.w.cwiseProduct(s.w)), h) + s.X.squaredNorm() +
         s.Y.squaredNorm();
}

}  // namespace

ContextCache::ContextCache(const PlantParameters& params, const GainConfig& gains, int nx,
                           int refine)
    : params_(params), gains_(gains), nx_(nx), refine_(refine) {}

void ContextCache::warm(const std::vector<ThetaTriple>& triples) {
  std::set<std::pair<double, double>> missing;
  for (const ThetaTriple& th : triples) {
    const std::pair<double, double> key{th.d1, th.d2};
    if (!tables_.count(key)) missing.insert(key);
  }
  std::vector<std::pair<double, double>> keys(missing.begin(), missing.end());
  std::vector<std::future<std::shared_ptr<const KernelTable>>> jobs;
  jobs.reserve(keys.size());
  for (const auto& key : keys)
    jobs.push_back(std::async(std::launch::async, [this, key] {
      return build_kernel_table(params_, gains_.kappas, key.first, key.second, nx_, params_.m,
                                refine_);
    }));
  for (size_t k = 0; k < keys.size(); ++k) tables_[keys[k]] = jobs[k].get();
}

const ControllerContext& ContextCache::get(const ThetaTriple& theta) {
  const std::tuple<double, double, double> ckey{theta.d1, theta.d2, theta.b};
  auto it = contexts_.find(ckey);
  if (it != contexts_.end()) return it->second;
  const std::pair<double, double> tkey{theta.d1, theta.d2};
  auto tit = tables_.find(tkey);
  if (tit == tables_.end()) {
    tables_[tkey] =
        build_kernel_table(params_, gains_.kappas, theta.d1, theta.d2, nx_, params_.m, refine_);
    tit = tables_.find(tkey);
  }
  auto [cit, ok] =
      contexts_.emplace(ckey, build_context(params_, theta, gains_, tit->second));
  return cit->second;
}

RunResult run_scenario(const ScenarioConfig& config) {
  const PlantParameters& pp = config.plant;
  const bool controlled = config.mode != RunMode::OpenLoop;
  const bool adaptive = config.mode == RunMode::Adaptive;
  const bool diag_on = controlled && config.diag_stride > 0;

  RunResult res;
  PlantState state = config.initial_state();
  enforce_boundary_compatibility(state, pp);

  // contexts
  std::unique_ptr<ContextCache> cache;
  std::unique_ptr<DiagnosticsContext> diag;
  std::unique_ptr<LyapunovConfig> lyap;
  const ControllerContext* ctx_hat = nullptr;       // estimate-side controller
  std::vector<const ControllerContext*> feasible;   // filter contexts
  ThetaTriple theta_hat = adaptive ? config.initial.theta0 : pp.theta();
  FeasibleSet D;
  if (controlled) {
    cache = std::make_unique<ContextCache>(pp, config.gains, config.grid.nx,
                                           config.kernel_refine);
    if (adaptive) {
      D = initial_feasible_set(pp.theta_box, config.estimator.pitch, theta_hat);
      std::vector<ThetaTriple> all = D.grid;
      all.push_back(D.exact);
      cache->warm(all);
      for (const ThetaTriple& th : D.grid) feasible.push_back(&cache->get(th));
      feasible.push_back(&cache->get(D.exact));
    } else {
      D.exact = pp.theta();
      feasible.push_back(&cache->get(pp.theta()));
    }
    ctx_hat = &cache->get(theta_hat);

    // assumption checks with the true-theta context
    const ControllerContext& true_ctx = cache->get(pp.theta());
    const double gamma0 = gamma_derivs(state, true_ctx, 0)[0];
    const ValidationReport report = validate(pp, state, config.grid, gamma0);
    if (!report.all_ok()) {
      std::string msg = "assumption validation failed:";
      for (const auto& m : report.messages) msg += "\n  " + m;
      throw std::runtime_error(msg);
    }
    if (diag_on) {
      diag = std::make_unique<DiagnosticsContext>(
          build_diagnostics(pp, config.gains, config.grid.nx));
      lyap = std::make_unique<LyapunovConfig>(
          lyapunov_rate(pp, config.gains, Eigen::MatrixXd::Identity(pp.n, pp.n)));
      res.sigma0 = lyap->sigma0;
    }
  }

  // identifier state
  WindowAccumulators acc;
  acc.nbar_count = config.nbar_count;
  acc.dt = config.grid.dt;
  ExcitationState exc_state;
  exc_state.opts = config.excitation;
  exc_state.zero_initial_profiles = state.z.cwiseAbs().maxCoeff() <= config.excitation.eps_abs &&
                                    state.w.cwiseAbs().maxCoeff() <= config.excitation.eps_abs;
  bool latched = false;
  int next_trigger = 1;

  const int nsteps = static_cast<int>(std::llround(config.horizon / config.grid.dt));
  res.norm0 = energy_norm(state);
  res.norm_max = res.norm0;
  res.rows.reserve(static_cast<size_t>(nsteps) + 1);

  double lastV = 0.0;
  Eigen::VectorXd lastH = Eigen::VectorXd::Zero(pp.m);
  double Ua_prev = 0.0;

  auto record = [&](double Ud, double Ua, double cmax, int active) {
    TraceRow row;
    row.t = state.t;
    row.Y = state.Y;
    row.X = state.X;
    row.Ud = Ud;
    row.Ua = Ua;
    row.cmax = cmax;
    row.filter_active = active;
    row.d1hat = adaptive ? theta_hat.d1 : pp.d1;
    row.d2hat = adaptive ? theta_hat.d2 : pp.d2;
    row.bhat = adaptive ? theta_hat.b : pp.b;
    row.D_card = static_cast<int>(D.size());
    row.V = lastV;
    row.h = lastH;
    res.rows.push_back(std::move(row));
  };

  try {
    for (int k = 0; k <= nsteps; ++k) {
      if (adaptive) acc.append(state, pp);

      // diagnostics at the configured stride
      if (diag_on && (k % config.diag_stride == 0 || k == nsteps)) {
        const TargetState target = forward_transform(state, *diag);
        lastV = lyapunov_V(target, *lyap);
        lastH = target.h;
        res.margins.update(state.t, state, target, pp.q2);
        res.V_series.emplace_back(state.t, lastV);
      } else if (controlled && state.Y(0) < res.margins.min_y1) {
        res.margins.min_y1 = state.Y(0);
        res.margins.t_min_y1 = state.t;
      }

      const double norm_now = energy_norm(state);
      res.norm_max = std::max(res.norm_max, norm_now);
      if (!std::isfinite(norm_now)) {
        res.diverged = true;
        record(0.0, 0.0, 0.0, 0);
        break;
      }

      // control input for the step [t_k, t_k + dt)
      double Ud = 0.0, Ua = 0.0, cmax = 0.0;
      int active = 0;
      if (controlled) {
        Ud = control_U(state, *ctx_hat, ctx_hat->gains.cs(pp.m - 1));
        const SafeActionBound bound = safe_lower_bound(state, feasible);
        cmax = bound.c_max;
        Ua = qp_filter(Ud, bound);
        active = (Ua > Ud) ? 1 : 0;
        if (adaptive && !latched) {
          const double t_next = config.schedule.trigger_time(next_trigger);
          const double mu = config.schedule.mu(next_trigger);
          Ua += excitation_monitor(exc_state, state, pp, Ua_prev, mu, t_next, true);
        }
      }
      record(Ud, Ua, cmax, active);
      if (k == nsteps) break;

      state = step(state, Ua, pp, config.grid);
      Ua_prev = Ua;

      // trigger processing at t_{i+1}
      if (adaptive && !latched) {
        const double t_next = config.schedule.trigger_time(next_trigger);
        if (state.t >= t_next - 0.5 * config.grid.dt && t_next <= config.horizon) {
          acc.append(state, pp);  // include the trigger-time sample
          const int k_end = static_cast<int>(acc.t.size()) - 1;
          const int k_mu =
              static_cast<int>(std::llround(config.schedule.mu(next_trigger) / config.grid.dt));
          std::vector<FermatSystem> systems;
          for (int nb = 1; nb <= config.nbar_count; ++nb)
            systems.push_back(assemble_fermat(acc, nb, k_mu, k_end));
          theta_hat = update_estimate(systems, theta_hat, pp.theta_box, config.estimator);
          D = update_feasible_set(systems, D, theta_hat, config.estimator);
          ctx_hat = &cache->get(theta_hat);
          feasible.clear();
          for (const ThetaTriple& th : D.grid) feasible.push_back(&cache->get(th));
          feasible.push_back(&cache->get(D.exact));
          if (D.diameter() < 0.5 * config.estimator.pitch) {
            latched = true;
            res.t_f = t_next;
            feasible.clear();
            feasible.push_back(ctx_hat);
          }
          excitation_rollover(exc_state, t_next, config.schedule.trigger_time(next_trigger + 1),
                              !latched);
          ++next_trigger;
          // drop the duplicate sample so indices keep matching k*dt
          acc.t.pop_back();
          for (auto& v : acc.a) v.pop_back();
          for (auto& v : acc.c) v.pop_back();
          for (auto& v : acc.sz) v.pop_back();
          for (auto& v : acc.sw) v.pop_back();
          acc.yn.pop_back();
          acc.ly.pop_back();
          acc.w0.pop_back();
        }
      }

      if (config.snapshot_every > 0 && ((k + 1) % config.snapshot_every == 0 || k + 1 == nsteps)) {
        res.snapshot_times.push_back(state.t);
        res.snapshot_z.push_back(state.z);
        res.snapshot_w.push_back(state.w);
      }
    }
  } catch (const std::exception& e) {
    res.fault = true;
    res.fault_message = e.what();
  }

  res.norm_final = res.rows.empty() ? 0.0 : energy_norm(state);
  if (res.norm_max > 10.0 * std::max(res.norm0, 1e-300)) res.diverged = true;
  res.theta_hat_final = theta_hat;

  std::ostringstream os;
  os << "mode: " << to_string(config.mode) << "\n";
  os << "nx: " << config.grid.nx << "  dt: " << fmt(config.grid.dt)
     << "  horizon: " << fmt(config.horizon) << "\n";
  os << "energy norm: initial " << fmt(res.norm0) << ", final " << fmt(res.norm_final)
     << ", max " << fmt(res.norm_max) << "\n";
  if (adaptive) {
    os << "theta_hat final: d1 " << fmt(theta_hat.d1) << ", d2 " << fmt(theta_hat.d2) << ", b "
       << fmt(theta_hat.b) << "\n";
    os << "t_f: " << (std::isnan(res.t_f) ? std::string("not latched") : fmt(res.t_f)) << "\n";
    os << "feasible set size: " << D.size() << "\n";
  }
  if (diag_on) os << res.margins.summary();
  if (res.diverged) os << "divergence flag set\n";
  if (res.fault) os << "fault: " << res.fault_message << "\n";
  res.summary_text = os.str();

  if (!config.out_dir.empty()) emit_traces(res, config, config.out_dir);
  return res;
}

void emit_traces(const RunResult& result, const ScenarioConfig& config, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const PlantParameters& pp = config.plant;

  {
    std::ofstream out(fs::path(dir) / "trace.csv");
    if (!out) throw std::runtime_error("cannot write trace.csv in '" + dir + "'");
    out << "t";
    for (int i = 1; i <= pp.n; ++i) out << ",y" << i;
    for (int i = 1; i <= pp.m; ++i) out << ",x" << i;
    out << ",Ud,Ua,cmax,filter_active,d1hat,d2hat,bhat,D_card,V";
    for (int i = 1; i <= pp.m; ++i) out << ",h" << i;
    out << "\n";
    for (const TraceRow& r : result.rows) {
      out << fmt(r.t);
      for (int i = 0; i < pp.n; ++i) out << "," << fmt(r.Y(i));
      for (int i = 0; i < pp.m; ++i) out << "," << fmt(r.X(i));
      out << "," << fmt(r.Ud) << "," << fmt(r.Ua) << "," << fmt(r.cmax) << ","
          << r.filter_active << "," << fmt(r.d1hat) << "," << fmt(r.d2hat) << ","
          << fmt(r.bhat) << "," << r.D_card << "," << fmt(r.V);
      for (int i = 0; i < pp.m; ++i) out << "," << fmt(r.h(i));
      out << "\n";
    }
  }
  auto write_matrix = [&](const std::string& name, const std::vector<Eigen::VectorXd>& rows) {
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw std::runtime_error("cannot write " + name + " in '" + dir + "'");
    for (const Eigen::VectorXd& v : rows) {
      for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << fmt(v(i));
      out << "\n";
    }
  };
  write_matrix("snapshots_z.txt", result.snapshot_z);
  write_matrix("snapshots_w.txt", result.snapshot_w);
  {
    std::ofstream out(fs::path(dir) / "snapshot_times.txt");
    for (double t : result.snapshot_times) out << fmt(t) << "\n";
  }
  {
    std::ofstream out(fs::path(dir) / "summary.txt");
    out << result.summary_text;
  }
}

RefinementStudy refinement_study(const ScenarioConfig& config, int levels) {
  if (levels < 2) throw std::invalid_argument("refinement_study: levels >= 2 required");
  std::vector<std::vector<double>> y1;  // per level, sampled on the base time grid
  RefinementStudy study;
  for (int k = 0; k < levels; ++k) {
    ScenarioConfig cfg = config;
    const int factor = 1 << k;
    cfg.grid.nx = config.grid.nx * factor;
    cfg.grid.dt = config.grid.dt / factor;
    cfg.out_dir.clear();
    cfg.diag_stride = 0;
    cfg.snapshot_every = 0;
    const RunResult run = run_scenario(cfg);
    if (run.fault) throw std::runtime_error("refinement level faulted: " + run.fault_message);
    std::vector<double> series;
    for (size_t j = 0; j * factor < run.rows.size(); ++j)
      series.push_back(run.rows[j * factor].Y(0));
    y1.push_back(std::move(series));

    RefinementLevel lvl;
    lvl.nx = cfg.grid.nx;
    lvl.dt = cfg.grid.dt;
    if (k > 0) {
      const size_t nsamp = std::min(y1[k].size(), y1[k - 1].size());
      double acc = 0.0;
      for (size_t j = 0; j < nsamp; ++j) {
        const double d = y1[k][j] - y1[k - 1][j];
        acc += d * d;
      }
      lvl.diff_y1 = std::sqrt(acc * config.grid.dt);
      if (k > 1 && lvl.diff_y1 > 0.0)
        lvl.order = std::log2(study.levels[static_cast<size_t>(k) - 1].diff_y1 / lvl.diff_y1);
    }
    study.levels.push_back(lvl);
  }
  std::ostringstream os;
  os << "level nx dt diff_y1 order\n";
  for (size_t k = 0; k < study.levels.size(); ++k) {
    const RefinementLevel& l = study.levels[k];
    os << k << " " << l.nx << " " << fmt(l.dt) << " " << fmt(l.diff_y1) << " " << fmt(l.order)
       << "\n";
  }
  study.table_text = os.str();
  return study;
}

}  // namespace sandwich
