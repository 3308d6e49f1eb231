#include "sandwich/plant.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sandwich/finite_difference.hpp"
#include "sandwich/kernels.hpp"
#include "sandwich/matrix_ops.hpp"
#include "sandwich/quadrature.hpp"

namespace sandwich {

ThetaTriple ThetaBox::clamp(const ThetaTriple& t) const {
  ThetaTriple out = t;
  out.d1 = std::min(std::max(out.d1, d1_lo), d1_hi);
  out.d2 = std::min(std::max(out.d2, d2_lo), d2_hi);
  out.b = std::min(std::max(out.b, b_lo), b_hi);
  return out;
}

Eigen::MatrixXd PlantParameters::A() const { return companion_matrix(l); }

Eigen::VectorXd PlantParameters::B() const {
  Eigen::VectorXd B = Eigen::VectorXd::Zero(n);
  B(n - 1) = b;
  return B;
}

void PlantParameters::check() const {
  if (q1 <= 0.0 || q2 <= 0.0) throw std::invalid_argument("plant: q1, q2 must be positive");
  if (b <= 0.0) throw std::invalid_argument("plant: b must be positive");
  if (n < 1) throw std::invalid_argument("plant: n >= 1 required");
  if (m < 1 || m > 2) throw std::invalid_argument("plant: m must be 1 or 2");
  if (l.size() != n || M.size() != n) throw std::invalid_argument("plant: l, M must have length n");
  if (qbar.size() != m) throw std::invalid_argument("plant: qbar must have length m");
  if (static_cast<int>(f.size()) != m) throw std::invalid_argument("plant: need m nonlinearities");
  if (m == 2 && !f1_prime) throw std::invalid_argument("plant: f1_prime required for m = 2");
  if (theta_box.b_lo <= 0.0) throw std::invalid_argument("plant: b lower bound must be positive");
  if (!theta_box.contains(theta())) throw std::invalid_argument("plant: theta outside its box");
}

void set_nonlinearity_preset(PlantParameters& params, const std::string& name) {
  params.f.clear();
  if (name == "zero") {
    for (int j = 0; j < params.m; ++j)
      params.f.push_back([](const Eigen::VectorXd&) { return 0.0; });
    params.f1_prime = [](double) { return 0.0; };
  } else if (name == "benchmark") {
    if (params.m != 2) throw std::invalid_argument("nonlinearity preset 'benchmark' needs m = 2");
    params.f.push_back([](const Eigen::VectorXd& x) { return x(0) * x(0); });
    params.f.push_back([](const Eigen::VectorXd& x) { return x(0) * x(1); });
    params.f1_prime = [](double x1) { return 2.0 * x1; };
  } else {
    throw std::invalid_argument("unknown nonlinearity preset: " + name);
  }
}

BoundaryDerivs boundary_time_derivatives(const PlantState& state, double d1, double d2,
                                         double q1, double q2, int order) {
  if (order < 0 || order > 2)
    throw std::invalid_argument("boundary_time_derivatives: order must be 0, 1, or 2");
  BoundaryDerivs out;
  if (order == 0) {
    out.z1 = state.z(state.z.size() - 1);
    out.z0 = state.z(0);
    out.w0 = state.w(0);
    out.w1 = state.w(state.w.size() - 1);
    return out;
  }
  const double h = 1.0 / static_cast<double>(state.z.size() - 1);
  const double zx0 = boundary_first_deriv_left(state.z, h);
  const double zx1 = boundary_first_deriv_right(state.z, h);
  const double wx0 = boundary_first_deriv_left(state.w, h);
  const double wx1 = boundary_first_deriv_right(state.w, h);
  if (order == 1) {
    out.z1 = -q1 * zx1 + d1 * state.w(state.w.size() - 1);
    out.z0 = -q1 * zx0 + d1 * state.w(0);
    out.w0 = q2 * wx0 + d2 * state.z(0);
    out.w1 = q2 * wx1 + d2 * state.z(state.z.size() - 1);
    return out;
  }
  // order 2: substitute the PDEs once more,
  // z_tt = q1^2 z_xx - (q1 + q2) d1 w_x ... expanded termwise below.
  const double zxx0 = boundary_second_deriv_left(state.z, h);
  const double zxx1 = boundary_second_deriv_right(state.z, h);
  const double wxx0 = boundary_second_deriv_left(state.w, h);
  const double wxx1 = boundary_second_deriv_right(state.w, h);
  const double z0 = state.z(0), z1 = state.z(state.z.size() - 1);
  const double w0 = state.w(0), w1 = state.w(state.w.size() - 1);
  // z_tt = -q1 (z_t)_x + d1 w_t = q1^2 z_xx - q1 d1 w_x + d1 q2 w_x + d1 d2 z
  out.z1 = q1 * q1 * zxx1 + d1 * (q2 - q1) * wx1 + d1 * d2 * z1;
  out.z0 = q1 * q1 * zxx0 + d1 * (q2 - q1) * wx0 + d1 * d2 * z0;
  // w_tt = q2 (w_t)_x + d2 z_t = q2^2 w_xx + d2 (q2 - q1) z_x + d1 d2 w
  out.w0 = q2 * q2 * wxx0 + d2 * (q2 - q1) * zx0 + d1 * d2 * w0;
  out.w1 = q2 * q2 * wxx1 + d2 * (q2 - q1) * zx1 + d1 * d2 * w1;
  return out;
}

namespace {

// Right-hand side of the two ODE blocks with frozen boundary signals.
struct OdeInputs {
  double w0 = 0.0;          // w(0,t)
  Eigen::VectorXd z_bnd;    // z^{(i)}(1,t), i = 0..m-1
  double U = 0.0;
};

void ode_rhs(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, const OdeInputs& in,
             const PlantParameters& prm, Eigen::VectorXd& dX, Eigen::VectorXd& dY) {
  dY = prm.A() * Y + prm.B() * in.w0;
  dX.resize(prm.m);
  for (int j = 0; j < prm.m - 1; ++j)
    dX(j) = X(j + 1) + prm.f[j](X.head(j + 1));
  double acc = prm.f[prm.m - 1](X.head(prm.m));
  for (int i = 0; i < prm.m; ++i) acc += prm.qbar(i) * in.z_bnd(i);
  acc += prm.M.dot(Y) + in.U;
  dX(prm.m - 1) = acc;
}

}  // namespace

PlantState step(const PlantState& state, double U, const PlantParameters& params,
                const SimGrid& grid) {
  const Eigen::Index np = state.z.size();
  const int nx = static_cast<int>(np) - 1;
  const double dx = 1.0 / nx;
  const double dt = grid.dt;
  const double cz = params.q1 * dt / dx;
  const double cw = params.q2 * dt / dx;

  PlantState next = state;

  // upwind transport with explicit coupling
  for (Eigen::Index i = 1; i < np; ++i)
    next.z(i) = state.z(i) - cz * (state.z(i) - state.z(i - 1)) + dt * params.d1 * state.w(i);
  for (Eigen::Index i = 0; i < np - 1; ++i)
    next.w(i) = state.w(i) + cw * (state.w(i + 1) - state.w(i)) + dt * params.d2 * state.z(i);

  // ODE blocks, classical 4-stage step with frozen boundary signals
  OdeInputs in;
  in.w0 = state.w(0);
  in.U = U;
  in.z_bnd.resize(params.m);
  for (int i = 0; i < params.m; ++i)
    in.z_bnd(i) =
        boundary_time_derivatives(state, params.d1, params.d2, params.q1, params.q2, i).z1;

  Eigen::VectorXd k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y;
  ode_rhs(state.X, state.Y, in, params, k1x, k1y);
  ode_rhs(state.X + 0.5 * dt * k1x, state.Y + 0.5 * dt * k1y, in, params, k2x, k2y);
  ode_rhs(state.X + 0.5 * dt * k2x, state.Y + 0.5 * dt * k2y, in, params, k3x, k3y);
  ode_rhs(state.X + dt * k3x, state.Y + dt * k3y, in, params, k4x, k4y);
  next.X = state.X + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  next.Y = state.Y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);

  // boundary conditions
  next.z(0) = params.p * next.w(0);
  next.w(np - 1) = next.X(0);
  next.t = state.t + dt;

  if (!next.z.allFinite() || !next.w.allFinite() || !next.X.allFinite() || !next.Y.allFinite()) {
    std::ostringstream os;
    os << "plant step produced non-finite values at t = " << next.t;
    throw std::runtime_error(os.str());
  }
  return next;
}

Eigen::MatrixXd predict_Y_free(const PlantState& state0, const PlantParameters& params,
                               double horizon, int nodes) {
  if (horizon > 1.0 / params.q2 + 1e-12)
    throw std::invalid_argument("predict_Y_free: horizon must not exceed 1/q2");
  if (nodes < 2) throw std::invalid_argument("predict_Y_free: need at least 2 nodes");
  const int np0 = static_cast<int>(state0.z.size());
  const double dxs = 1.0 / (np0 - 1);
  const Eigen::MatrixXd A = params.A();
  const Eigen::VectorXd B = params.B();

  // inflow eta(0,tau) = w(q2 tau, 0) - int_0^{q2 tau} (F z0 + H w0) dy,
  // sampled at tau_k with x_k = q2 tau_k on the state's own grid when possible.
  const double dtau = horizon / (nodes - 1);
  Eigen::VectorXd inflow(nodes);
  for (int k = 0; k < nodes; ++k) {
    const double x = params.q2 * dtau * k;
    // sample w(x,0) and the kernels on the sub-grid [0, x] of the state grid
    const double xi = x / dxs;
    const int il = std::min(static_cast<int>(xi), np0 - 2);
    const double fr = xi - il;
    const double wx = (1.0 - fr) * state0.w(il) + fr * state0.w(il + 1);
    double integral = 0.0;
    if (x > 1e-14) {
      const int jmax = std::min(static_cast<int>(std::floor(xi + 1e-12)), np0 - 1);
      Eigen::VectorXd fz(jmax + 1);
      for (int j = 0; j <= jmax; ++j) {
        const double y = j * dxs;
        const auto FH = kernel_FH(x, y, params.q1, params.q2, params.p, params.d1, params.d2);
        fz(j) = FH.F * state0.z(j) + FH.H * state0.w(j);
      }
      integral = trapezoid(fz, dxs);
      const double rem = x - jmax * dxs;
      if (rem > 1e-12 * dxs) {
        const auto FH = kernel_FH(x, x, params.q1, params.q2, params.p, params.d1, params.d2);
        const double zx = (1.0 - fr) * state0.z(il) + fr * state0.z(il + 1);
        integral += 0.5 * rem * (fz(jmax) + FH.F * zx + FH.H * wx);
      }
    }
    inflow(k) = wx - integral;
  }

  // Duhamel by trapezoid: Y(t_k) = e^{A t_k} Y0 + sum e^{A (t_k - tau_j)} B inflow_j
  Eigen::MatrixXd out(nodes, params.n);
  const Eigen::MatrixXd E = expm(A * dtau);
  std::vector<Eigen::MatrixXd> Epow(nodes);
  Epow[0] = Eigen::MatrixXd::Identity(params.n, params.n);
  for (int k = 1; k < nodes; ++k) Epow[k] = E * Epow[k - 1];
  for (int k = 0; k < nodes; ++k) {
    Eigen::VectorXd Y = Epow[k] * state0.Y;
    if (k > 0) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(params.n);
      for (int j = 0; j <= k; ++j) {
        const double wq = (j == 0 || j == k) ? 0.5 : 1.0;
        acc += wq * (Epow[k - j] * B) * inflow(j);
      }
      Y += dtau * acc;
    }
    out.row(k) = Y.transpose();
  }
  return out;
}

bool enforce_boundary_compatibility(PlantState& state, const PlantParameters& params) {
  const Eigen::Index np = state.z.size();
  const double tol = 1e-12;
  bool ok = std::abs(state.z(0) - params.p * state.w(0)) <= tol &&
            std::abs(state.w(np - 1) - state.X(0)) <= tol;
  state.z(0) = params.p * state.w(0);
  state.w(np - 1) = state.X(0);
  return ok;
}

ValidationReport validate(const PlantParameters& params, const PlantState& state0,
                          const SimGrid& grid, double gamma0) {
  ValidationReport rep;
  params.check();

  if (grid.dt * std::max(params.q1, params.q2) > grid.dx() + 1e-15) {
    rep.cfl_ok = false;
    rep.messages.push_back("CFL violated: dt*max(q1,q2) > dx");
  }

  for (int j = 0; j < params.m; ++j) {
    const double f0 = params.f[j](Eigen::VectorXd::Zero(j + 1));
    if (std::abs(f0) > 0.0) {
      rep.assumption1_ok = false;
      rep.messages.push_back("Assumption 1 violated: f(0) != 0");
    }
  }

  if (!params.theta_box.contains(params.theta()) || params.theta_box.b_lo <= 0.0) {
    rep.assumption2_ok = false;
    rep.messages.push_back("Assumption 2 violated: theta outside the known box");
  }

  PlantState compat = state0;
  rep.boundary_compatible = enforce_boundary_compatibility(compat, params);
  if (!rep.boundary_compatible)
    rep.messages.push_back("initial data not boundary compatible; samples overwritten");

  // Assumption 3: y1(0) >= 0 and the free response stays nonneg, ending positive.
  if (state0.Y(0) < 0.0) {
    rep.assumption3_ok = false;
    rep.messages.push_back("Assumption 3(i) violated: y1(0) < 0");
  }
  const int nodes = static_cast<int>(state0.z.size());
  const Eigen::MatrixXd traj = predict_Y_free(compat, params, 1.0 / params.q2, nodes);
  rep.assumption3_min = traj.col(0).minCoeff();
  rep.assumption3_terminal = traj(traj.rows() - 1, 0);
  const double tol3 = 1e-9 * std::max(1.0, std::abs(state0.Y(0)));
  if (rep.assumption3_min < -tol3 || rep.assumption3_terminal <= 0.0) {
    rep.assumption3_ok = false;
    std::ostringstream os;
    os << "Assumption 3(ii) violated: min predicted y1 = " << rep.assumption3_min
       << ", y1(1/q2) = " << rep.assumption3_terminal;
    rep.messages.push_back(os.str());
  }

  // Assumption 4: x1(0) > Gamma(0) (supplied by the caller; falls back to
  // x1(0) > 0, exact when all profiles and Y vanish).
  const double threshold = std::isnan(gamma0) ? 0.0 : gamma0;
  rep.assumption4_margin = state0.X(0) - threshold;
  if (!(rep.assumption4_margin > 0.0)) {
    rep.assumption4_ok = false;
    std::ostringstream os;
    os << "Assumption 4 violated: x1(0) - Gamma(0) = " << rep.assumption4_margin;
    rep.messages.push_back(os.str());
  }
  return rep;
}

}  // namespace sandwich
