#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "sandwich/controller.hpp"
#include "sandwich/kernels.hpp"
#include "sandwich/plant.hpp"

namespace sandwich {

// Transformed (target-system) state: the distal chain Z, the transport pair
// (alpha, beta) on the x-grid, and the proximal chain h.
struct TargetState {
  Eigen::VectorXd Z;
  Eigen::VectorXd alpha, beta;
  Eigen::VectorXd h;
};

// Kernel tables over the full triangle needed by the transformation: the
// Psi/Phi family in closed form, the phi/varphi family from the
// characteristics solver, and the gain rows lambda(x), gamma(x).
struct DiagnosticsContext {
  PlantParameters params;  // true parameters
  GainConfig gains;
  ControllerContext ctrl;          // for the Gamma functionals / h-chain
  Eigen::MatrixXd Psi, Phi;        // (nx+1)^2, lower triangle
  Eigen::MatrixXd phi, varphi;     // (nx+1)^2, lower triangle
  Eigen::MatrixXd lambda_rows;     // (nx+1) x n
  Eigen::MatrixXd gamma_rows;      // (nx+1) x n
  int nx = 0;
};

DiagnosticsContext build_diagnostics(const PlantParameters& params, const GainConfig& gains,
                                     int nx);

TargetState forward_transform(const PlantState& state, const DiagnosticsContext& ctx);

// Analysis constants of the energy functional: P from the Lyapunov equation
// of the bidiagonal chain matrix, a0/r at 1.01x their lower bounds, and the
// decay rate sigma0.
struct LyapunovConfig {
  Eigen::MatrixXd Q, P;
  double a0 = 0.0, r = 0.0;
  double xi2 = 0.0;     // upper equivalence constant
  double sigma0 = 0.0;  // decay rate
};

LyapunovConfig lyapunov_rate(const PlantParameters& params, const GainConfig& gains,
                             const Eigen::MatrixXd& Q);

double lyapunov_V(const TargetState& target, const LyapunovConfig& config);

// Running safety margins over a trajectory; z/beta margins only count from
// t >= 1/q2 (the transport delay before the input reaches the distal ODE).
struct MarginsReport {
  double min_y1 = std::numeric_limits<double>::infinity();
  double min_beta = std::numeric_limits<double>::infinity();
  Eigen::VectorXd min_z, min_h;  // sized on first update
  double t_min_y1 = 0.0;
  bool diverged = false;  // any non-finite or runaway sample observed

  void update(double t, const PlantState& state, const TargetState& target, double q2);
  bool all_above(double tol) const;
  std::string summary() const;
};

}  // namespace sandwich
