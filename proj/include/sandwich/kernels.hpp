#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "sandwich/plant.hpp"

namespace sandwich {

struct KernelPoint {
  double F = 0.0;
  double H = 0.0;
};

// Closed-form kernels of the PDE system
//   q2 F_x - q1 F_y = d2 H,  q2 (H_x + H_y) = d1 F,
//   F(x,x) = -d2/(q1+q2),    H(x,0) = (q1 p / q2) F(x,0)
// on 0 <= y <= x <= 1, via modified Bessel functions and the Marcum-type Pi
// function. The removable 0/0 on the diagonal of H is evaluated through
// 2 I1(z)/z, which is smooth at z = 0.
KernelPoint kernel_FH(double x, double y, double q1, double q2, double p, double d1, double d2);

// Coefficient rows of the linear maps g_i(Y) = G_i . Y built by the chain
// g_0 = 0, g_i = -kappa_i (y_i - g_{i-1}) + shift(G_{i-1}) . Y.
// Returns G_0..G_{n-1} (G_0 is the zero row).
std::vector<Eigen::RowVectorXd> g_coefficient_rows(const Eigen::VectorXd& kappas, int n);

// Gain row K^T built from the g-chain partials divided by b.
Eigen::RowVectorXd gain_vector_K(const Eigen::VectorXd& l, double b,
                                 const Eigen::VectorXd& kappas);

// lambda(x) = K^T e^{A x / q2}, gamma(x) = p K^T e^{-A x / q1}.
struct LambdaGamma {
  Eigen::RowVectorXd lambda;
  Eigen::RowVectorXd gamma;
};
LambdaGamma lambda_gamma(double x, const Eigen::MatrixXd& A, double q1, double q2, double p,
                         const Eigen::RowVectorXd& K);

// Numerical oracle: characteristics integration of the F/H kernel PDEs with
// successive approximation to fixed-point residual < 1e-8. resolution = cell
// count of the triangle grid. Returns (resolution+1)^2 matrices, lower
// triangle (y <= x) meaningful.
struct KernelField {
  Eigen::MatrixXd F;  // indexed (ix, iy)
  Eigen::MatrixXd H;
};
KernelField kernel_pde_oracle(const PlantParameters& params, int resolution);

// Generic characteristics solver for the Goursat-type 2x2 systems appearing
// here. Unknowns (V, W) on the triangle satisfy
//   aV . grad V = cV * W   with V(x,x) = v_diag,
//   aW . grad W = cW * V   with W(x,0) = r0 * V(x,0) + s0(x),
// where aV points from the diagonal into the triangle and aW is parallel to
// (1,1). Used for the F/H oracle and the diagnostics-side phi/varphi tables.
struct GoursatSpec {
  double aVx = 0.0, aVy = 0.0;  // characteristic direction of V (into triangle from diagonal)
  double cV = 0.0;              // source coefficient multiplying W
  double v_diag = 0.0;
  double aW = 1.0;              // speed along (1,1) for W
  double cW = 0.0;              // source coefficient multiplying V
  double r0 = 0.0;
  std::vector<double> s0;       // sampled s0(x) on the grid (empty = zero)
};
struct GoursatField {
  Eigen::MatrixXd V;
  Eigen::MatrixXd W;
};
GoursatField solve_goursat(const GoursatSpec& spec, int resolution, double tol = 1e-8,
                           int max_sweeps = 200);

// Precomputed kernel tables for one (d1, d2) pair (b-independent): the rows
// Psi(1,.), Phi(1,.) with 1st/2nd derivatives on a refined grid, restricted to
// the simulation grid, plus the R_i/P_i combination tables. Shared between all
// b values of the safety filter's candidate grid.
struct KernelTable {
  double d1 = 0.0, d2 = 0.0;
  int nx = 0;                  // simulation grid cells
  Eigen::VectorXd psi1, phi1;  // on the simulation y-grid (nx+1 points)
  Eigen::VectorXd psi1_dy, psi1_dyy, phi1_dy, phi1_dyy;
  // R_0..R_m, P_0..P_m sampled on the simulation y-grid (closed forms, m <= 2)
  std::vector<Eigen::VectorXd> R, P;
};

// Per-triple context: the shared table plus the b-dependent gain rows.
struct KernelContext {
  ThetaTriple theta;
  std::shared_ptr<const KernelTable> table;
  Eigen::RowVectorXd K;
  std::vector<Eigen::RowVectorXd> lambdaA;  // lambda(1) A^i, i = 0..m
  Eigen::RowVectorXd lambda1;               // = lambdaA[0]
  double lambda1B = 0.0;                    // lambda(1) B
  double lambda1AB = 0.0;                   // lambda(1) A B
};

// Build the shared (d1,d2) table. refine = refinement factor of the internal
// grid relative to nx (default 4); m = number of R/P levels.
std::shared_ptr<const KernelTable> build_kernel_table(const PlantParameters& params,
                                                      const Eigen::VectorXd& kappas, double d1,
                                                      double d2, int nx, int m, int refine = 4);

KernelContext build_kernel_context(const PlantParameters& params, const ThetaTriple& theta,
                                   const Eigen::VectorXd& kappas,
                                   std::shared_ptr<const KernelTable> table);

// Psi/Phi over the whole triangle on the simulation grid (diagnostics use).
struct TriangleKernels {
  Eigen::MatrixXd Psi, Phi;  // (nx+1)^2, lower triangle meaningful
};
TriangleKernels psi_phi_triangle(const PlantParameters& params, double d1, double d2,
                                 const Eigen::RowVectorXd& K, int nx);

// Fast closed-form F/H evaluator with tabulated Bessel/Pi inner functions;
// used to build the kernel tables (the direct kernel_FH is the reference).
class FHEvaluator {
 public:
  FHEvaluator(double q1, double q2, double p, double d1, double d2);
  KernelPoint operator()(double x, double y) const;

 private:
  double q1_, q2_, p_, d1_, d2_;
  double zmax_ = 0.0, s1max_ = 0.0, s2max_ = 0.0;
  Eigen::VectorXd i0_tab_, i1r_tab_;
  Eigen::MatrixXd pi_tab_;
  double i0_at(double z) const;
  double i1r_at(double z) const;
  double pi_at(double s1, double s2) const;
};

}  // namespace sandwich
