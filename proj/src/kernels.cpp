#include "sandwich/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sandwich/finite_difference.hpp"
#include "sandwich/matrix_ops.hpp"
#include "sandwich/quadrature.hpp"
#include "sandwich/special_functions.hpp"

namespace sandwich {

namespace {

struct KernelArgs {
  double zeta, s1, s2, u, v;
};

KernelArgs kernel_args(double x, double y, double q1, double q2, double p, double d1, double d2) {
  if (q1 <= 0.0 || q2 <= 0.0) throw std::invalid_argument("kernel_FH: q1, q2 must be positive");
  if (p == 0.0) throw std::invalid_argument("kernel_FH: p must be nonzero");
  if (y > x + 1e-12) throw std::invalid_argument("kernel_FH: requires y <= x");
  const double prod = d1 * d2;
  if (prod < 0.0)
    throw std::domain_error("kernel_FH: closed form requires d1*d2 >= 0");
  KernelArgs a;
  a.u = std::max(x - y, 0.0);
  a.v = q1 * x / q2 + y;
  a.zeta = 2.0 * std::sqrt(prod) / (q1 + q2) * std::sqrt(std::max(a.u * a.v, 0.0));
  a.s1 = p * q1 * d2 / q2 * a.u / (q1 + q2);
  a.s2 = d1 / (p * q1) * (q1 * x + q2 * y) / (q1 + q2);
  if (a.s1 < -1e-14 || a.s2 < -1e-14)
    throw std::domain_error("kernel_FH: closed form requires p*d2 >= 0 and d1/p >= 0");
  a.s1 = std::max(a.s1, 0.0);
  a.s2 = std::max(a.s2, 0.0);
  return a;
}

KernelPoint assemble_FH(const KernelArgs& a, double q1, double q2, double p, double d1, double d2,
                        double I0, double I1r, double Pi) {
  const double cF0 = d1 * q2 / (p * q1);
  KernelPoint out;
  out.F = -1.0 / (p * (q1 + q2)) *
          (cF0 * I0 + d1 * d2 * a.u / (q1 + q2) * I1r + (p * d2 - cF0) * Pi);
  out.H = -1.0 / (q1 + q2) *
          (d1 / p * I0 + d1 * d2 * a.v / (q1 + q2) * I1r + (p * d2 * q1 / q2 - d1 / p) * Pi);
  return out;
}

// Catmull-Rom weights on [0,1).
inline void cr_weights(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t + 2.0 * t2 - t3);
  w[1] = 0.5 * (2.0 - 5.0 * t2 + 3.0 * t3);
  w[2] = 0.5 * (t + 4.0 * t2 - 3.0 * t3);
  w[3] = 0.5 * (-t2 + t3);
}

inline double cr_eval_1d(const Eigen::VectorXd& tab, double pos) {
  // pos in table index units, clamped.
  const Eigen::Index n = tab.size() - 1;
  pos = std::min(std::max(pos, 0.0), static_cast<double>(n));
  Eigen::Index k = std::min(static_cast<Eigen::Index>(pos), n - 1);
  const double t = pos - static_cast<double>(k);
  double w[4];
  cr_weights(t, w);
  auto at = [&](Eigen::Index i) { return tab(std::min(std::max(i, Eigen::Index{0}), n)); };
  return w[0] * at(k - 1) + w[1] * at(k) + w[2] * at(k + 1) + w[3] * at(k + 2);
}

// Piecewise-linear interpolation on the triangular split of the grid cells;
// never touches points above the diagonal when (px, py) is inside the
// triangle y <= x.
inline double tri_interp(const Eigen::MatrixXd& f, double px, double py, double h) {
  const Eigen::Index n = f.rows() - 1;
  double xi = px / h, eta = py / h;
  xi = std::min(std::max(xi, 0.0), static_cast<double>(n));
  eta = std::min(std::max(eta, 0.0), xi);
  Eigen::Index i0 = std::min(static_cast<Eigen::Index>(xi), n - 1);
  Eigen::Index j0 = std::min(static_cast<Eigen::Index>(eta), n - 1);
  if (j0 > i0) j0 = i0;
  const double tx = xi - static_cast<double>(i0);
  double ty = eta - static_cast<double>(j0);
  if (j0 == i0 && ty > tx) ty = tx;  // keep the sample on the triangle
  if (ty <= tx) {
    // triangle (i0,j0)-(i0+1,j0)-(i0+1,j0+1)
    return f(i0, j0) + (f(i0 + 1, j0) - f(i0, j0)) * tx +
           (f(i0 + 1, j0 + 1) - f(i0 + 1, j0)) * ty;
  }
  // triangle (i0,j0)-(i0,j0+1)-(i0+1,j0+1); corner (i0,j0+1) still has j0+1 <= i0
  return f(i0, j0) + (f(i0, j0 + 1) - f(i0, j0)) * ty +
         (f(i0 + 1, j0 + 1) - f(i0, j0 + 1)) * tx;
}

}  // namespace

KernelPoint kernel_FH(double x, double y, double q1, double q2, double p, double d1, double d2) {
  const KernelArgs a = kernel_args(x, y, q1, q2, p, d1, d2);
  const double I0 = bessel_I(0, a.zeta);
  const double I1r = bessel_i1_ratio(a.zeta);
  const double Pi = pi_function(a.s1, a.s2);
  return assemble_FH(a, q1, q2, p, d1, d2, I0, I1r, Pi);
}

std::vector<Eigen::RowVectorXd> g_coefficient_rows(const Eigen::VectorXd& kappas, int n) {
  if (n < 1) throw std::invalid_argument("g_coefficient_rows: n >= 1 required");
  if (kappas.size() < n) throw std::invalid_argument("g_coefficient_rows: kappas too short");
  std::vector<Eigen::RowVectorXd> G;
  G.reserve(n);
  G.push_back(Eigen::RowVectorXd::Zero(n));
  for (int i = 1; i < n; ++i) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
    // -kappa_i (y_i - g_{i-1})
    row(i - 1) -= kappas(i - 1);
    row += kappas(i - 1) * G[i - 1];
    // + sum_j dg_{i-1}/dy_j * y_{j+1}
    for (int j = 0; j + 1 < n; ++j) row(j + 1) += G[i - 1](j);
    G.push_back(row);
  }
  return G;
}

Eigen::RowVectorXd gain_vector_K(const Eigen::VectorXd& l, double b,
                                 const Eigen::VectorXd& kappas) {
  const int n = static_cast<int>(l.size());
  if (n < 1) throw std::invalid_argument("gain_vector_K: empty l");
  if (b == 0.0) throw std::invalid_argument("gain_vector_K: b must be nonzero");
  if (kappas.size() < n) throw std::invalid_argument("gain_vector_K: kappas too short");
  const Eigen::RowVectorXd Gl = g_coefficient_rows(kappas, n).back();
  Eigen::RowVectorXd K(n);
  const double kn = kappas(n - 1);
  for (int j = 0; j < n; ++j) {
    double val = -l(j) + kn * Gl(j);
    if (j > 0) val += Gl(j - 1);
    if (j == n - 1) val -= kn;
    K(j) = val / b;
  }
  return K;
}

LambdaGamma lambda_gamma(double x, const Eigen::MatrixXd& A, double q1, double q2, double p,
                         const Eigen::RowVectorXd& K) {
  LambdaGamma out;
  out.lambda = K * expm(A * (x / q2));
  out.gamma = p * (K * expm(A * (-x / q1)));
  return out;
}

GoursatField solve_goursat(const GoursatSpec& spec, int resolution, double tol, int max_sweeps) {
  if (resolution < 2) throw std::invalid_argument("solve_goursat: resolution >= 2 required");
  if (spec.aVx == spec.aVy)
    throw std::invalid_argument("solve_goursat: V characteristic parallel to the diagonal");
  if (spec.aW == 0.0) throw std::invalid_argument("solve_goursat: aW must be nonzero");
  if (!spec.s0.empty() && static_cast<int>(spec.s0.size()) != resolution + 1)
    throw std::invalid_argument("solve_goursat: s0 must have resolution+1 samples");
  const int N = resolution;
  const double h = 1.0 / N;
  auto s0_at = [&](int k) { return spec.s0.empty() ? 0.0 : spec.s0[static_cast<size_t>(k)]; };

  Eigen::MatrixXd V = Eigen::MatrixXd::Constant(N + 1, N + 1, spec.v_diag);
  Eigen::MatrixXd W(N + 1, N + 1);
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j <= N; ++j) W(i, j) = spec.r0 * spec.v_diag + s0_at(std::max(i - j, 0));

  Eigen::MatrixXd Vn = V, Wn = W;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double resid = 0.0;
    for (int i = 0; i <= N; ++i) {
      const double x = i * h;
      for (int j = 0; j <= i; ++j) {
        const double y = j * h;
        // V: integrate cV*W along the characteristic from the diagonal anchor.
        const double sstar = (x - y) / (spec.aVx - spec.aVy);
        const double ax = x - spec.aVx * sstar, ay = y - spec.aVy * sstar;
        double vval = spec.v_diag;
        if (i != j) {
          const double span = std::max(std::abs(x - ax), std::abs(y - ay));
          const int ks = std::max(1, static_cast<int>(std::ceil(span / h)));
          double acc = 0.0;
          for (int k = 0; k <= ks; ++k) {
            const double tau = static_cast<double>(k) / ks;
            const double wk = (k == 0 || k == ks) ? 0.5 : 1.0;
            acc += wk * tri_interp(W, ax + tau * (x - ax), ay + tau * (y - ay), h);
          }
          vval += sstar * spec.cV * acc / ks;
        }
        Vn(i, j) = vval;
        // W: integrate (cW/aW)*V along (1,1) from the anchor (x-y, 0).
        double wval = spec.r0 * Vn(i - j, 0) + s0_at(i - j);
        if (j > 0) {
          const int ks = std::max(1, j);
          double acc = 0.0;
          for (int k = 0; k <= ks; ++k) {
            const double tau = static_cast<double>(k) / ks;
            const double wk = (k == 0 || k == ks) ? 0.5 : 1.0;
            acc += wk * tri_interp(V, (x - y) + tau * y, tau * y, h);
          }
          wval += y * spec.cW / spec.aW * acc / ks;
        }
        Wn(i, j) = wval;
        resid = std::max(resid, std::max(std::abs(Vn(i, j) - V(i, j)),
                                         std::abs(Wn(i, j) - W(i, j))));
      }
    }
    V.swap(Vn);
    W.swap(Wn);
    if (resid < tol) break;
    if (sweep + 1 == max_sweeps)
      throw std::runtime_error("solve_goursat: fixed point did not reach tolerance");
  }
  // mirror onto the unused upper triangle so downstream interpolation stays finite
  for (int i = 0; i <= N; ++i)
    for (int j = i + 1; j <= N; ++j) {
      V(i, j) = V(j, i);
      W(i, j) = W(j, i);
    }
  return {V, W};
}

KernelField kernel_pde_oracle(const PlantParameters& params, int resolution) {
  GoursatSpec spec;
  spec.aVx = params.q2;
  spec.aVy = -params.q1;
  spec.cV = params.d2;
  spec.v_diag = -params.d2 / (params.q1 + params.q2);
  spec.aW = params.q2;
  spec.cW = params.d1;
  spec.r0 = params.q1 * params.p / params.q2;
  GoursatField g = solve_goursat(spec, resolution);
  return {std::move(g.V), std::move(g.W)};
}

FHEvaluator::FHEvaluator(double q1, double q2, double p, double d1, double d2)
    : q1_(q1), q2_(q2), p_(p), d1_(d1), d2_(d2) {
  kernel_args(1.0, 1.0, q1, q2, p, d1, d2);  // argument validation
  // Range of the Bessel argument over the triangle, by coarse sampling.
  double uv_max = 0.0;
  for (int i = 0; i <= 64; ++i)
    for (int j = 0; j <= i; ++j) {
      const double x = i / 64.0, y = j / 64.0;
      uv_max = std::max(uv_max, (x - y) * (q1 * x / q2 + y));
    }
  const double prod = d1 * d2;
  zmax_ = 2.0 * std::sqrt(std::max(prod, 0.0)) / (q1 + q2) * std::sqrt(uv_max) * 1.001;
  s1max_ = std::max(p * q1 * d2 / q2 / (q1 + q2), 0.0);
  s2max_ = std::max(d1 / (p * q1), 0.0);
  if (zmax_ > 1e-12) {
    const int nb = 1024;
    i0_tab_.resize(nb + 1);
    i1r_tab_.resize(nb + 1);
    for (int k = 0; k <= nb; ++k) {
      const double z = zmax_ * k / nb;
      i0_tab_(k) = bessel_I(0, z);
      i1r_tab_(k) = bessel_i1_ratio(z);
    }
  }
  if (s1max_ > 1e-12 && s2max_ > 1e-12) {
    const int np = 128;
    pi_tab_.resize(np + 1, np + 1);
    for (int a = 0; a <= np; ++a)
      for (int c = 0; c <= np; ++c)
        pi_tab_(a, c) = pi_function(s1max_ * a / np, s2max_ * c / np);
  }
}

double FHEvaluator::i0_at(double z) const {
  if (i0_tab_.size() == 0) return 1.0;
  return cr_eval_1d(i0_tab_, z / zmax_ * (i0_tab_.size() - 1));
}

double FHEvaluator::i1r_at(double z) const {
  if (i1r_tab_.size() == 0) return 1.0;
  return cr_eval_1d(i1r_tab_, z / zmax_ * (i1r_tab_.size() - 1));
}

double FHEvaluator::pi_at(double s1, double s2) const {
  if (s1max_ <= 1e-12) return 1.0;            // Pi(0, s2) = 1
  if (s2max_ <= 1e-12) return std::exp(s1);   // Pi(s1, 0) = e^{s1}
  const Eigen::Index n1 = pi_tab_.rows() - 1, n2 = pi_tab_.cols() - 1;
  double pa = std::min(std::max(s1 / s1max_ * n1, 0.0), static_cast<double>(n1));
  double pc = std::min(std::max(s2 / s2max_ * n2, 0.0), static_cast<double>(n2));
  Eigen::Index ka = std::min(static_cast<Eigen::Index>(pa), n1 - 1);
  Eigen::Index kc = std::min(static_cast<Eigen::Index>(pc), n2 - 1);
  double wa[4], wc[4];
  cr_weights(pa - static_cast<double>(ka), wa);
  cr_weights(pc - static_cast<double>(kc), wc);
  auto clampi = [](Eigen::Index i, Eigen::Index n) {
    return std::min(std::max(i, Eigen::Index{0}), n);
  };
  double out = 0.0;
  for (int a = 0; a < 4; ++a) {
    const Eigen::Index ia = clampi(ka - 1 + a, n1);
    double row = 0.0;
    for (int c = 0; c < 4; ++c) row += wc[c] * pi_tab_(ia, clampi(kc - 1 + c, n2));
    out += wa[a] * row;
  }
  return out;
}

KernelPoint FHEvaluator::operator()(double x, double y) const {
  const KernelArgs a = kernel_args(x, y, q1_, q2_, p_, d1_, d2_);
  return assemble_FH(a, q1_, q2_, p_, d1_, d2_, i0_at(a.zeta), i1r_at(a.zeta),
                     pi_at(a.s1, a.s2));
}

std::shared_ptr<const KernelTable> build_kernel_table(const PlantParameters& params,
                                                      const Eigen::VectorXd& kappas, double d1,
                                                      double d2, int nx, int m, int refine) {
  if (nx < 2 || refine < 1) throw std::invalid_argument("build_kernel_table: bad grid");
  if (m < 1 || m > 2) throw std::invalid_argument("build_kernel_table: m must be 1 or 2");
  const int Nr = nx * refine;
  const double h = 1.0 / Nr;
  const FHEvaluator fh(params.q1, params.q2, params.p, d1, d2);

  // lambda(x) B is independent of b (K ~ 1/b cancels B ~ b); use b = 1.
  const Eigen::RowVectorXd K1 = gain_vector_K(params.l, 1.0, kappas);
  const Eigen::MatrixXd A = params.A();
  const Eigen::MatrixXd E = expm(A * (h / params.q2));
  Eigen::VectorXd lb(Nr + 1);  // lambda(x_k) B / q2
  Eigen::RowVectorXd row = K1;
  for (int k = 0; k <= Nr; ++k) {
    lb(k) = row(row.size() - 1) / params.q2;
    row = row * E;
  }

  // Psi(1,y) = F(1,y) + int_y^1 L(1,r) F(r,y) dr, L(1,r) = -lambda(1-r) B / q2;
  // Phi(1,y) = H(1,y) - L(1,y) + int_y^1 L(1,r) H(r,y) dr.
  Eigen::VectorXd psiR(Nr + 1), phiR(Nr + 1);
  Eigen::VectorXd fcol(Nr + 1), hcol(Nr + 1);
  for (int j = 0; j <= Nr; ++j) {
    const double y = j * h;
    const int cnt = Nr - j;
    Eigen::VectorXd integF(cnt + 1), integH(cnt + 1);
    double F1 = 0.0, H1 = 0.0;
    for (int i = j; i <= Nr; ++i) {
      const KernelPoint k = fh(i * h, y);
      if (i == Nr) {
        F1 = k.F;
        H1 = k.H;
      }
      integF(i - j) = -lb(Nr - i) * k.F;
      integH(i - j) = -lb(Nr - i) * k.H;
    }
    psiR(j) = F1 + simpson(integF, h);
    phiR(j) = H1 + lb(Nr - j) + simpson(integH, h);
  }

  const Eigen::VectorXd psiR_dy = derivative_o4(psiR, h);
  const Eigen::VectorXd psiR_dyy = second_derivative_o4(psiR, h);
  const Eigen::VectorXd phiR_dy = derivative_o4(phiR, h);
  const Eigen::VectorXd phiR_dyy = second_derivative_o4(phiR, h);

  auto table = std::make_shared<KernelTable>();
  table->d1 = d1;
  table->d2 = d2;
  table->nx = nx;
  auto subsample = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(nx + 1);
    for (int j = 0; j <= nx; ++j) out(j) = v(j * refine);
    return out;
  };
  table->psi1 = subsample(psiR);
  table->phi1 = subsample(phiR);
  table->psi1_dy = subsample(psiR_dy);
  table->psi1_dyy = subsample(psiR_dyy);
  table->phi1_dy = subsample(phiR_dy);
  table->phi1_dyy = subsample(phiR_dyy);

  const double q1 = params.q1, q2 = params.q2;
  table->R.resize(m + 1);
  table->P.resize(m + 1);
  table->R[0] = table->psi1;
  table->P[0] = table->phi1;
  table->R[1] = q1 * table->psi1_dy + d2 * table->phi1;
  table->P[1] = -q2 * table->phi1_dy + d1 * table->psi1;
  if (m >= 2) {
    table->R[2] = q1 * q1 * table->psi1_dyy + (q1 - q2) * d2 * table->phi1_dy +
                  d1 * d2 * table->psi1;
    table->P[2] = q2 * q2 * table->phi1_dyy + (q1 - q2) * d1 * table->psi1_dy +
                  d1 * d2 * table->phi1;
  }
  return table;
}

KernelContext build_kernel_context(const PlantParameters& params, const ThetaTriple& theta,
                                   const Eigen::VectorXd& kappas,
                                   std::shared_ptr<const KernelTable> table) {
  KernelContext ctx;
  ctx.theta = theta;
  ctx.table = std::move(table);
  ctx.K = gain_vector_K(params.l, theta.b, kappas);
  const Eigen::MatrixXd A = params.A();
  const int m = params.m;
  ctx.lambdaA.resize(m + 1);
  ctx.lambdaA[0] = ctx.K * expm(A * (1.0 / params.q2));
  for (int i = 1; i <= m; ++i) ctx.lambdaA[i] = ctx.lambdaA[i - 1] * A;
  ctx.lambda1 = ctx.lambdaA[0];
  Eigen::VectorXd B = Eigen::VectorXd::Zero(params.n);
  B(params.n - 1) = theta.b;
  ctx.lambda1B = ctx.lambdaA[0] * B;
  ctx.lambda1AB = ctx.lambdaA[1] * B;
  return ctx;
}

TriangleKernels psi_phi_triangle(const PlantParameters& params, double d1, double d2,
                                 const Eigen::RowVectorXd& K, int nx) {
  const double h = 1.0 / nx;
  const FHEvaluator fh(params.q1, params.q2, params.p, d1, d2);
  const Eigen::MatrixXd A = params.A();
  const Eigen::MatrixXd E = expm(A * (h / params.q2));
  const Eigen::VectorXd B = params.B();
  Eigen::VectorXd lb(nx + 1);  // lambda(x_k) B / q2
  Eigen::RowVectorXd row = K;
  for (int k = 0; k <= nx; ++k) {
    lb(k) = row.dot(B) / params.q2;
    row = row * E;
  }
  TriangleKernels out;
  out.Psi = Eigen::MatrixXd::Zero(nx + 1, nx + 1);
  out.Phi = Eigen::MatrixXd::Zero(nx + 1, nx + 1);
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double y = j * h;
      const int cnt = i - j;
      Eigen::VectorXd integF(cnt + 1), integH(cnt + 1);
      KernelPoint kij{};
      for (int k = j; k <= i; ++k) {
        const KernelPoint kp = fh(k * h, y);
        if (k == i) kij = kp;
        integF(k - j) = -lb(i - k) * kp.F;
        integH(k - j) = -lb(i - k) * kp.H;
      }
      out.Psi(i, j) = kij.F + simpson(integF, h);
      out.Phi(i, j) = kij.H + lb(i - j) + simpson(integH, h);
    }
  }
  return out;
}

}  // namespace sandwich
