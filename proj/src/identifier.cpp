#include "sandwich/identifier.hpp"

#include <cmath>
#include <stdexcept>

#include "sandwich/quadrature.hpp"

namespace sandwich {

void WindowAccumulators::append(const PlantState& state, const PlantParameters& params) {
  const Eigen::Index np = state.z.size();
  const double h = 1.0 / static_cast<double>(np - 1);
  if (sin_w_.rows() != nbar_count || sin_w_.cols() != np) {
    sin_w_.resize(nbar_count, np);
    cos_w_.resize(nbar_count, np);
    for (int nb = 1; nb <= nbar_count; ++nb)
      for (Eigen::Index j = 0; j < np; ++j) {
        const double arg = nb * M_PI * (j * h);
        sin_w_(nb - 1, j) = std::sin(arg);
        cos_w_(nb - 1, j) = std::cos(arg);
      }
    a.resize(nbar_count);
    c.resize(nbar_count);
    sz.resize(nbar_count);
    sw.resize(nbar_count);
  }
  t.push_back(state.t);
  for (int nb = 0; nb < nbar_count; ++nb) {
    const Eigen::VectorXd s = sin_w_.row(nb).transpose();
    const Eigen::VectorXd cw = cos_w_.row(nb).transpose();
    const double iz = trapezoid(Eigen::VectorXd(s.cwiseProduct(state.z)), h);
    const double iw = trapezoid(Eigen::VectorXd(s.cwiseProduct(state.w)), h);
    sz[nb].push_back(iz);
    sw[nb].push_back(iw);
    a[nb].push_back(iz + iw);
    c[nb].push_back(trapezoid(
        Eigen::VectorXd(cw.cwiseProduct(params.q1 * state.z - params.q2 * state.w)), h));
  }
  yn.push_back(state.Y(params.n - 1));
  ly.push_back(params.l.dot(state.Y));
  w0.push_back(state.w(0));
}

Eigen::Matrix3d FermatSystem::G() const {
  Eigen::Matrix3d g;
  g << Q1, Q2, 0.0, Q2, Q3, 0.0, 0.0, 0.0, Q4;
  return g;
}

Eigen::Vector3d FermatSystem::Z() const { return {H1, H2, H3}; }

FermatSystem assemble_fermat(const WindowAccumulators& win, int nbar, int k_mu, int k_end) {
  if (nbar < 1 || nbar > win.nbar_count)
    throw std::invalid_argument("assemble_fermat: mode index out of range");
  if (k_mu < 0 || k_end >= static_cast<int>(win.t.size()) || k_end < k_mu)
    throw std::invalid_argument("assemble_fermat: bad window indices");
  const int nb = nbar - 1;
  const int cnt = k_end - k_mu + 1;
  const double dt = win.dt;

  auto window = [&](const std::vector<double>& v) {
    return std::vector<double>(v.begin() + k_mu, v.begin() + k_end + 1);
  };
  // inner (running) time integrals from mu
  const std::vector<double> g1 = cumulative_trapezoid(window(win.sw[nb]), dt);
  const std::vector<double> g2 = cumulative_trapezoid(window(win.sz[nb]), dt);
  const std::vector<double> ic = cumulative_trapezoid(window(win.c[nb]), dt);
  const std::vector<double> qb = cumulative_trapezoid(window(win.w0), dt);
  const std::vector<double> il = cumulative_trapezoid(window(win.ly), dt);

  Eigen::VectorXd p(cnt), pb(cnt), vg1(cnt), vg2(cnt), vqb(cnt);
  for (int k = 0; k < cnt; ++k) {
    p(k) = (win.a[nb][k_mu + k] - win.a[nb][k_mu]) - M_PI * nbar * ic[k];
    pb(k) = win.yn[k_mu + k] - win.yn[k_mu] - il[k];
    vg1(k) = g1[k];
    vg2(k) = g2[k];
    vqb(k) = qb[k];
  }

  FermatSystem sys;
  sys.H1 = trapezoid(Eigen::VectorXd(vg1.cwiseProduct(p)), dt);
  sys.H2 = trapezoid(Eigen::VectorXd(vg2.cwiseProduct(p)), dt);
  sys.H3 = trapezoid(Eigen::VectorXd(vqb.cwiseProduct(pb)), dt);
  sys.Q1 = trapezoid(Eigen::VectorXd(vg1.cwiseProduct(vg1)), dt);
  sys.Q2 = trapezoid(Eigen::VectorXd(vg1.cwiseProduct(vg2)), dt);
  sys.Q3 = trapezoid(Eigen::VectorXd(vg2.cwiseProduct(vg2)), dt);
  sys.Q4 = trapezoid(Eigen::VectorXd(vqb.cwiseProduct(vqb)), dt);
  return sys;
}

double FeasibleSet::diameter() const {
  auto dist = [](const ThetaTriple& u, const ThetaTriple& v) {
    return std::max({std::abs(u.d1 - v.d1), std::abs(u.d2 - v.d2), std::abs(u.b - v.b)});
  };
  std::vector<ThetaTriple> all = grid;
  all.push_back(exact);
  double d = 0.0;
  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = i + 1; j < all.size(); ++j) d = std::max(d, dist(all[i], all[j]));
  return d;
}

FeasibleSet initial_feasible_set(const ThetaBox& box, double pitch, const ThetaTriple& theta0) {
  if (!(pitch > 0.0)) throw std::invalid_argument("initial_feasible_set: pitch must be positive");
  FeasibleSet set;
  set.exact = box.clamp(theta0);
  auto axis = [&](double lo, double hi) {
    std::vector<double> v;
    const int k = std::max(0, static_cast<int>(std::round((hi - lo) / pitch)));
    for (int i = 0; i <= k; ++i) v.push_back(std::min(lo + i * pitch, hi));
    return v;
  };
  for (double d1 : axis(box.d1_lo, box.d1_hi))
    for (double d2 : axis(box.d2_lo, box.d2_hi))
      for (double b : axis(box.b_lo, box.b_hi)) set.grid.push_back({d1, d2, b});
  return set;
}

ThetaTriple update_estimate(const std::vector<FermatSystem>& systems, const ThetaTriple& prev,
                            const ThetaBox& box, const EstimatorOptions& opts) {
  if (systems.empty()) throw std::invalid_argument("update_estimate: no systems");
  const int nm = static_cast<int>(systems.size());
  Eigen::MatrixXd M(2 * nm, 2);
  Eigen::VectorXd v(2 * nm);
  for (int k = 0; k < nm; ++k) {
    M(2 * k, 0) = systems[k].Q1;
    M(2 * k, 1) = systems[k].Q2;
    M(2 * k + 1, 0) = systems[k].Q2;
    M(2 * k + 1, 1) = systems[k].Q3;
    v(2 * k) = systems[k].H1;
    v(2 * k + 1) = systems[k].H2;
  }
  // minimum-change solution: previous estimate plus the pseudo-inverse
  // correction (projects the previous (d1,d2) onto the solution set)
  Eigen::Vector2d prev_d(prev.d1, prev.d2);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(opts.rank_tol);
  const Eigen::Vector2d sol = prev_d + svd.solve(v - M * prev_d);

  ThetaTriple out = prev;
  out.d1 = sol(0);
  out.d2 = sol(1);
  // b is identified from the scalar ratio of the decoupled block
  const double Q4 = systems.front().Q4;
  if (Q4 > opts.q4_threshold) out.b = systems.front().H3 / Q4;
  out = box.clamp(out);

  auto hold = [&](double fresh, double old) {
    return std::abs(fresh - old) < opts.hold_rel * std::abs(old) ? old : fresh;
  };
  out.d1 = hold(out.d1, prev.d1);
  out.d2 = hold(out.d2, prev.d2);
  out.b = hold(out.b, prev.b);
  return out;
}

FeasibleSet update_feasible_set(const std::vector<FermatSystem>& systems, const FeasibleSet& prev,
                                const ThetaTriple& exact_candidate,
                                const EstimatorOptions& opts) {
  auto passes = [&](const ThetaTriple& th) {
    const Eigen::Vector3d ell(th.d1, th.d2, th.b);
    for (const FermatSystem& s : systems) {
      const Eigen::Vector3d Z = s.Z();
      if ((Z - s.G() * ell).norm() > opts.eps_D * (1.0 + Z.norm())) return false;
    }
    return true;
  };
  FeasibleSet out;
  out.exact = exact_candidate;
  for (const ThetaTriple& th : prev.grid)
    if (passes(th)) out.grid.push_back(th);
  return out;
}

}  // namespace sandwich
