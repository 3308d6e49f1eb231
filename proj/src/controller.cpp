#include "sandwich/controller.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sandwich/quadrature.hpp"

namespace sandwich {

void GainConfig::check(int n, int m) const {
  if (kappas.size() != n) throw std::invalid_argument("GainConfig: kappas must have length n");
  if (cs.size() != m) throw std::invalid_argument("GainConfig: cs must have length m");
  for (int i = 0; i < n; ++i)
    if (!(kappas(i) > 0.0)) throw std::invalid_argument("GainConfig: kappas must be positive");
  for (int i = 0; i + 1 < m; ++i)
    if (!(cs(i) > 2.0)) throw std::invalid_argument("GainConfig: c_i > 2 required for i < m");
  if (!(cs(m - 1) > 1.0)) throw std::invalid_argument("GainConfig: c_m > 1 required");
  if (!(cbar >= cs(m - 1))) throw std::invalid_argument("GainConfig: cbar >= c_m required");
}

ControllerContext build_context(const PlantParameters& params, const ThetaTriple& theta,
                                const GainConfig& gains, int nx, int refine) {
  auto table = build_kernel_table(params, gains.kappas, theta.d1, theta.d2, nx, params.m, refine);
  return build_context(params, theta, gains, std::move(table));
}

ControllerContext build_context(const PlantParameters& params, const ThetaTriple& theta,
                                const GainConfig& gains,
                                std::shared_ptr<const KernelTable> table) {
  gains.check(params.n, params.m);
  ControllerContext ctx;
  ctx.params = params;
  ctx.gains = gains;
  ctx.kernel = build_kernel_context(params, theta, gains.kappas, std::move(table));
  return ctx;
}

std::vector<double> gamma_derivs(const PlantState& state, const ControllerContext& ctx,
                                 int order) {
  const PlantParameters& pp = ctx.params;
  if (order < 0 || order > pp.m)
    throw std::invalid_argument("gamma_derivs: order must be in [0, m]");
  const KernelTable& tab = *ctx.kernel.table;
  const Eigen::Index np = state.z.size();
  if (tab.psi1.size() != np)
    throw std::invalid_argument("gamma_derivs: table grid does not match the state grid");
  const double h = 1.0 / static_cast<double>(np - 1);
  const ThetaTriple& th = ctx.kernel.theta;

  std::vector<double> out(static_cast<size_t>(order) + 1, 0.0);
  out[0] = trapezoid(Eigen::VectorXd(tab.psi1.cwiseProduct(state.z)), h) +
           trapezoid(Eigen::VectorXd(tab.phi1.cwiseProduct(state.w)), h) +
           ctx.kernel.lambda1 * state.Y;

  if (order == 0) return out;
  // boundary traces and time derivatives up to order-1, with the estimated
  // couplings substituted into the PDEs
  std::vector<BoundaryDerivs> bd(static_cast<size_t>(order));
  for (int j = 0; j < order; ++j)
    bd[static_cast<size_t>(j)] =
        boundary_time_derivatives(state, th.d1, th.d2, pp.q1, pp.q2, j);

  const Eigen::Index last = np - 1;
  for (int i = 1; i <= order; ++i) {
    double g = trapezoid(Eigen::VectorXd(tab.R[i].cwiseProduct(state.z)), h) +
               trapezoid(Eigen::VectorXd(tab.P[i].cwiseProduct(state.w)), h) +
               ctx.kernel.lambdaA[i] * state.Y;
    for (int j = 0; j <= i - 1; ++j) {
      const Eigen::VectorXd& R = tab.R[i - 1 - j];
      const Eigen::VectorXd& P = tab.P[i - 1 - j];
      const BoundaryDerivs& b = bd[static_cast<size_t>(j)];
      const double lamAB = ctx.kernel.lambdaA[i - 1 - j](pp.n - 1) * th.b;
      g += -pp.q1 * R(last) * b.z1 + pp.q1 * R(0) * b.z0;
      g += pp.q2 * P(last) * b.w1 - (pp.q2 * P(0) - lamAB) * b.w0;
    }
    out[static_cast<size_t>(i)] = g;
  }
  return out;
}

namespace {

// tau-chain pieces shared by control_U and check_c_thresholds (m <= 2).
struct TauChain {
  double h1 = 0.0, tau1 = 0.0, h2 = 0.0;
};

TauChain tau_chain(const PlantState& state, const ControllerContext& ctx,
                   const std::vector<double>& gam) {
  const PlantParameters& pp = ctx.params;
  TauChain tc;
  tc.h1 = state.X(0) - gam[0];
  if (pp.m >= 2) {
    const double f1 = pp.f[0](state.X.head(1));
    tc.tau1 = -ctx.gains.cs(0) * tc.h1 - f1;
    tc.h2 = state.X(1) - tc.tau1 - gam[1];
  }
  return tc;
}

}  // namespace

double control_U(const PlantState& state, const ControllerContext& ctx, double c_last) {
  const PlantParameters& pp = ctx.params;
  if (pp.m < 1 || pp.m > 2) throw std::invalid_argument("control_U: m must be 1 or 2");
  const std::vector<double> gam = gamma_derivs(state, ctx, pp.m);
  const TauChain tc = tau_chain(state, ctx, gam);
  const ThetaTriple& th = ctx.kernel.theta;

  double tau_m = 0.0;
  if (pp.m == 1) {
    tau_m = -c_last * tc.h1 - pp.f[0](state.X.head(1));
  } else {
    const double f1 = pp.f[0](state.X.head(1));
    const double f2 = pp.f[1](state.X.head(2));
    const double df1 = pp.f1_prime ? pp.f1_prime(state.X(0)) : 0.0;
    const double c1 = ctx.gains.cs(0);
    tau_m = -c_last * tc.h2 - f2 + (-c1 - df1) * (state.X(1) + f1) + c1 * gam[1];
  }

  // measured boundary feedthrough: qbar_i z_t^(i)(1,t), i = 0..m-1
  double feed = 0.0;
  for (int i = 0; i < pp.m; ++i) {
    const BoundaryDerivs b = boundary_time_derivatives(state, th.d1, th.d2, pp.q1, pp.q2, i);
    feed += pp.qbar(i) * b.z1;
  }

  const double U = tau_m - feed - pp.M.dot(state.Y) + gam[static_cast<size_t>(pp.m)];
  if (!std::isfinite(U)) throw std::runtime_error("control_U: non-finite control value");
  return U;
}

std::vector<double> check_kappa_thresholds(const Eigen::VectorXd& kappas,
                                           const Eigen::VectorXd& Y_at_1_over_q2) {
  const int n = static_cast<int>(Y_at_1_over_q2.size());
  if (kappas.size() != n)
    throw std::invalid_argument("check_kappa_thresholds: kappas/Y length mismatch");
  const auto G = g_coefficient_rows(kappas, n);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n > 0 ? n - 1 : 0));
  for (int i = 1; i <= n - 1; ++i) {
    const Eigen::RowVectorXd& Gm = G[static_cast<size_t>(i - 1)];
    // numerator: sum_j dg_{i-1}/dy_j * y_{j+1}(1/q2) - y_{i+1}(1/q2)
    double num = -Y_at_1_over_q2(i);
    for (int j = 0; j + 1 < n; ++j) num += Gm(j) * Y_at_1_over_q2(j + 1);
    const double den = Y_at_1_over_q2(i - 1) - Gm * Y_at_1_over_q2;
    if (!(den > 0.0))
      throw std::runtime_error("check_kappa_thresholds: chain value z_i(1/q2) not positive");
    out.push_back(num / den);
  }
  return out;
}

std::vector<double> check_c_thresholds(const PlantState& state0,
                                       const std::vector<const ControllerContext*>& contexts) {
  if (contexts.empty()) throw std::invalid_argument("check_c_thresholds: no contexts");
  const int m = contexts.front()->params.m;
  if (m < 1 || m > 2) throw std::invalid_argument("check_c_thresholds: m must be 1 or 2");
  std::vector<double> out;
  if (m == 1) return out;  // only c_1 = c_m, no threshold beyond c_m > 1
  double best = -std::numeric_limits<double>::infinity();
  for (const ControllerContext* ctx : contexts) {
    const std::vector<double> gam = gamma_derivs(state0, *ctx, 1);
    const double h1 = state0.X(0) - gam[0];
    if (!(h1 > 0.0))
      throw std::runtime_error("check_c_thresholds: denominator h_1(0) not positive");
    const double f1 = ctx->params.f[0](state0.X.head(1));
    best = std::max(best, (-state0.X(1) - f1 + gam[1]) / h1);
  }
  out.push_back(best);
  return out;
}

}  // namespace sandwich
