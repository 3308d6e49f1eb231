#include "sandwich/diagnostics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sandwich/matrix_ops.hpp"
#include "sandwich/quadrature.hpp"

namespace sandwich {

DiagnosticsContext build_diagnostics(const PlantParameters& params, const GainConfig& gains,
                                     int nx) {
  DiagnosticsContext ctx;
  ctx.params = params;
  ctx.gains = gains;
  ctx.nx = nx;
  ctx.ctrl = build_context(params, params.theta(), gains, nx);

  const Eigen::RowVectorXd K = ctx.ctrl.kernel.K;
  const Eigen::MatrixXd A = params.A();
  const Eigen::VectorXd B = params.B();
  const double h = 1.0 / nx;

  ctx.lambda_rows.resize(nx + 1, params.n);
  ctx.gamma_rows.resize(nx + 1, params.n);
  const Eigen::MatrixXd El = expm(A * (h / params.q2));
  const Eigen::MatrixXd Eg = expm(A * (-h / params.q1));
  Eigen::RowVectorXd rl = K, rg = params.p * K;
  for (int i = 0; i <= nx; ++i) {
    ctx.lambda_rows.row(i) = rl;
    ctx.gamma_rows.row(i) = rg;
    rl = rl * El;
    rg = rg * Eg;
  }

  TriangleKernels tk = psi_phi_triangle(params, params.d1, params.d2, K, nx);
  ctx.Psi = std::move(tk.Psi);
  ctx.Phi = std::move(tk.Phi);

  // phi/varphi family via the characteristics solver:
  //   q2 varphi_y - q1 varphi_x = d1 phi,   varphi(x,x) = d1/(q1+q2)
  //   q1 (phi_x + phi_y) = -d2 varphi,      phi(x,0) = (q2/(q1 p)) varphi(x,0)
  //                                                     - gamma(x) B / (q1 p)
  GoursatSpec spec;
  spec.aVx = -params.q1;
  spec.aVy = params.q2;
  spec.cV = params.d1;
  spec.v_diag = params.d1 / (params.q1 + params.q2);
  spec.aW = params.q1;
  spec.cW = -params.d2;
  spec.r0 = params.q2 / (params.q1 * params.p);
  spec.s0.resize(static_cast<size_t>(nx) + 1);
  for (int i = 0; i <= nx; ++i)
    spec.s0[static_cast<size_t>(i)] =
        -(ctx.gamma_rows.row(i) * B)(0) / (params.q1 * params.p);
  GoursatField g = solve_goursat(spec, nx);
  ctx.varphi = std::move(g.V);
  ctx.phi = std::move(g.W);
  return ctx;
}

TargetState forward_transform(const PlantState& state, const DiagnosticsContext& ctx) {
  const PlantParameters& pp = ctx.params;
  const int nx = ctx.nx;
  const double h = 1.0 / nx;
  if (state.z.size() != nx + 1)
    throw std::invalid_argument("forward_transform: state grid does not match context");

  TargetState out;
  // distal chain
  const auto G = g_coefficient_rows(ctx.gains.kappas, pp.n);
  out.Z.resize(pp.n);
  for (int i = 0; i < pp.n; ++i) out.Z(i) = state.Y(i) - G[static_cast<size_t>(i)] * state.Y;

  // transport pair
  out.alpha.resize(nx + 1);
  out.beta.resize(nx + 1);
  for (int i = 0; i <= nx; ++i) {
    Eigen::VectorXd az(i + 1), aw(i + 1), bz(i + 1), bw(i + 1);
    for (int k = 0; k <= i; ++k) {
      az(k) = ctx.phi(i, k) * state.z(k);
      aw(k) = ctx.varphi(i, k) * state.w(k);
      bz(k) = ctx.Psi(i, k) * state.z(k);
      bw(k) = ctx.Phi(i, k) * state.w(k);
    }
    out.alpha(i) = state.z(i) - trapezoid(az, h) - trapezoid(aw, h) -
                   ctx.gamma_rows.row(i) * state.Y;
    out.beta(i) = state.w(i) - trapezoid(bz, h) - trapezoid(bw, h) -
                  ctx.lambda_rows.row(i) * state.Y;
  }

  // proximal chain
  const std::vector<double> gam = gamma_derivs(state, ctx.ctrl, pp.m - 1);
  out.h.resize(pp.m);
  out.h(0) = state.X(0) - gam[0];
  if (pp.m >= 2) {
    const double f1 = pp.f[0](state.X.head(1));
    const double tau1 = -ctx.gains.cs(0) * out.h(0) - f1;
    out.h(1) = state.X(1) - tau1 - gam[1];
  }
  return out;
}

LyapunovConfig lyapunov_rate(const PlantParameters& params, const GainConfig& gains,
                             const Eigen::MatrixXd& Q) {
  const int n = params.n;
  for (int i = 0; i < n; ++i)
    if (!(gains.kappas(i) > 0.0))
      throw std::invalid_argument("lyapunov_rate: chain matrix not Hurwitz (kappa_i <= 0)");
  Eigen::MatrixXd Az = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Az(i, i) = -gains.kappas(i);
    if (i + 1 < n) Az(i, i + 1) = 1.0;
  }
  LyapunovConfig cfg;
  cfg.Q = Q;
  cfg.P = lyapunov_solve(Az, Q);

  const Eigen::VectorXd B = params.B();
  const double lam_min_Q =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q).eigenvalues().minCoeff();
  const double lam_max_P =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cfg.P).eigenvalues().maxCoeff();
  const double PB2 = (cfg.P * B).squaredNorm();
  const double e = std::exp(1.0);
  cfg.a0 = 1.01 * (params.q1 * params.p * params.p / params.q2 +
                   4.0 * PB2 / (params.q2 * lam_min_Q));
  cfg.r = 1.01 * (params.q2 * cfg.a0 * e / 3.0 + 1.0);
  cfg.xi2 = std::max({lam_max_P, cfg.r / 2.0, cfg.a0 * e / 2.0, 0.5});
  cfg.sigma0 = std::min({1.0, lam_min_Q / 2.0, params.q1 / (2.0 * e),
                         params.q2 * cfg.a0 / 2.0}) /
               cfg.xi2;
  return cfg;
}

double lyapunov_V(const TargetState& target, const LyapunovConfig& config) {
  const Eigen::Index np = target.alpha.size();
  const double h = 1.0 / static_cast<double>(np - 1);
  Eigen::VectorXd ia(np), ib(np);
  for (Eigen::Index i = 0; i < np; ++i) {
    const double x = i * h;
    ia(i) = std::exp(-x) * target.alpha(i) * target.alpha(i);
    ib(i) = std::exp(x) * target.beta(i) * target.beta(i);
  }
  return target.Z.dot(config.P * target.Z) + 0.5 * config.r * target.h.squaredNorm() +
         0.5 * trapezoid(ia, h) + 0.5 * config.a0 * trapezoid(ib, h);
}

void MarginsReport::update(double t, const PlantState& state, const TargetState& target,
                           double q2) {
  if (min_z.size() == 0) {
    min_z = Eigen::VectorXd::Constant(target.Z.size(),
                                      std::numeric_limits<double>::infinity());
    min_h = Eigen::VectorXd::Constant(target.h.size(),
                                      std::numeric_limits<double>::infinity());
  }
  if (!state.Y.allFinite() || !target.beta.allFinite()) {
    diverged = true;
    return;
  }
  if (state.Y(0) < min_y1) {
    min_y1 = state.Y(0);
    t_min_y1 = t;
  }
  min_h = min_h.cwiseMin(target.h);
  if (t >= 1.0 / q2 - 1e-12) {
    min_z = min_z.cwiseMin(target.Z);
    min_beta = std::min(min_beta, target.beta.minCoeff());
  }
}

bool MarginsReport::all_above(double tol) const {
  if (diverged || min_y1 < -tol) return false;
  if (min_z.size() == 0) return true;  // target-state tracking was disabled
  return min_beta >= -tol && min_z.minCoeff() >= -tol && min_h.minCoeff() >= -tol;
}

std::string MarginsReport::summary() const {
  std::ostringstream os;
  os << "min y1 = " << min_y1 << " (t = " << t_min_y1 << ")\n";
  os << "min beta (t >= 1/q2) = " << min_beta << "\n";
  for (Eigen::Index i = 0; i < min_z.size(); ++i)
    os << "min z_" << (i + 1) << " (t >= 1/q2) = " << min_z(i) << "\n";
  for (Eigen::Index i = 0; i < min_h.size(); ++i)
    os << "min h_" << (i + 1) << " = " << min_h(i) << "\n";
  if (diverged) os << "divergence detected\n";
  return os.str();
}

}  // namespace sandwich
