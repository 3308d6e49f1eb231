#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "sandwich/plant.hpp"

namespace sandwich {

// Triggering times t_i = i*T and window starts
// mu_{i+1} = min{ t_g : g <= i, t_g >= t_{i+1} - Ntilde*T }.
struct TriggerSchedule {
  double T = 1.5;
  int Ntilde = 10;
  double trigger_time(int i) const { return static_cast<double>(i) * T; }
  double mu(int i_plus_1) const {
    const int g = std::max(0, i_plus_1 - Ntilde);
    return static_cast<double>(g) * T;
  }
};

// Time series of the spatially integrated functionals feeding the batch
// least-squares systems; appended once per simulation step from t = 0 so any
// window [mu, t] can be assembled later.
struct WindowAccumulators {
  int nbar_count = 1;  // number of sine modes
  double dt = 1e-3;
  std::vector<double> t;
  // per mode (outer index nbar-1):
  std::vector<std::vector<double>> a;   // int sin(n pi x) (z + w) dx
  std::vector<std::vector<double>> c;   // int cos(n pi x) (q1 z - q2 w) dx
  std::vector<std::vector<double>> sz;  // int sin(n pi x) z dx
  std::vector<std::vector<double>> sw;  // int sin(n pi x) w dx
  std::vector<double> yn;  // y_n(t)
  std::vector<double> ly;  // l . Y(t)
  std::vector<double> w0;  // w(0, t)

  void append(const PlantState& state, const PlantParameters& params);

 private:
  Eigen::MatrixXd sin_w_, cos_w_;  // cached spatial weights (mode x gridpoint)
};

// Normal-equation entries of the windowed least-squares cost for one mode:
//   d-part:  p(t) = d1 g1(t) + d2 g2(t),  b-part:  p_b(t) = b q_b(t),
// integrated over the window. G() is the stacked 3x3 system matrix, Z() the
// right-hand side.
struct FermatSystem {
  double H1 = 0, H2 = 0, H3 = 0;
  double Q1 = 0, Q2 = 0, Q3 = 0, Q4 = 0;
  Eigen::Matrix3d G() const;
  Eigen::Vector3d Z() const;
};

// Assemble the mode-nbar system over window samples [k_mu, k_end].
FermatSystem assemble_fermat(const WindowAccumulators& win, int nbar, int k_mu, int k_end);

// Feasible parameter set: a finite grid over the box plus the current exact
// least-squares candidate (always a member).
struct FeasibleSet {
  std::vector<ThetaTriple> grid;
  ThetaTriple exact;
  size_t size() const { return grid.size() + 1; }
  double diameter() const;  // max pairwise L-inf distance over all members
};

FeasibleSet initial_feasible_set(const ThetaBox& box, double pitch, const ThetaTriple& theta0);

struct EstimatorOptions {
  double rank_tol = 1e-8;      // relative singular-value threshold
  double hold_rel = 0.05;      // discard estimate changes below this fraction
  double q4_threshold = 1e-12; // below this, b-hat is held
  double eps_D = 1e-4;         // relative residual tolerance for set pruning
  double pitch = 0.2;          // feasible-set grid pitch
};

// Batch update: minimum-change least-squares solution of the stacked systems
// projected into the box, with the b-ratio update and the relative-hold rule.
ThetaTriple update_estimate(const std::vector<FermatSystem>& systems, const ThetaTriple& prev,
                            const ThetaBox& box, const EstimatorOptions& opts);

// Prune the grid against the stacked residual test; the exact candidate is
// always retained so the set never empties.
FeasibleSet update_feasible_set(const std::vector<FermatSystem>& systems, const FeasibleSet& prev,
                                const ThetaTriple& exact_candidate,
                                const EstimatorOptions& opts);

}  // namespace sandwich
