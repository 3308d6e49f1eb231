#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "sandwich/kernels.hpp"
#include "sandwich/plant.hpp"

namespace sandwich {

struct GainConfig {
  Eigen::VectorXd kappas;  // kappa_1..kappa_n > 0
  Eigen::VectorXd cs;      // c_1..c_m
  double cbar = 0.0;       // filter rate, >= c_m
  void check(int n, int m) const;  // structural checks (positivity, cbar >= c_m)
};

// Everything needed to evaluate the control law under one parameter triple.
struct ControllerContext {
  PlantParameters params;  // structural plant data (q's, p, l, M, qbar, f)
  KernelContext kernel;    // triple-dependent gain rows + R/P tables
  GainConfig gains;
};

// Build a context from scratch (computes the kernel table) or around a shared
// precomputed table (safety-filter use: many b values per (d1,d2) table).
ControllerContext build_context(const PlantParameters& params, const ThetaTriple& theta,
                                const GainConfig& gains, int nx, int refine = 4);
ControllerContext build_context(const PlantParameters& params, const ThetaTriple& theta,
                                const GainConfig& gains,
                                std::shared_ptr<const KernelTable> table);

// Gamma and its time derivatives Gamma^(1)..Gamma^(order) (order <= m),
// boundary traces substituted via the transport PDEs.
std::vector<double> gamma_derivs(const PlantState& state, const ControllerContext& ctx,
                                 int order);

// Nominal law: tau-chain with rate c_last on the final stage (c_m for the
// nominal controller U, cbar for the filter bound U*), minus the measured
// boundary feedthrough terms.
double control_U(const PlantState& state, const ControllerContext& ctx, double c_last);

// Thresholds on kappa_1..kappa_{n-1} given the free distal response at t =
// 1/q2 (entry i-1 bounds kappa_i; kappa_n is unconstrained). The candidate
// kappas are needed because threshold i uses the chain built from the earlier
// entries. Throws when a chain denominator z_i(1/q2) is not positive.
std::vector<double> check_kappa_thresholds(const Eigen::VectorXd& kappas,
                                           const Eigen::VectorXd& Y_at_1_over_q2);

// Thresholds on c_1..c_{m-1} from the initial state, maximized over the
// supplied contexts (one context = nominal mode; a theta grid = adaptive mode).
// Throws when some h_i(0) denominator is not positive.
std::vector<double> check_c_thresholds(const PlantState& state0,
                                       const std::vector<const ControllerContext*>& contexts);

}  // namespace sandwich
