#pragma once

#include <Eigen/Dense>

namespace sandwich {

// Matrix exponential by scaling-and-squaring with a truncated Taylor series.
// Intended for the small dense companion matrices used here (n <= 6).
Eigen::MatrixXd expm(const Eigen::MatrixXd& A, double tol = 1e-14);

// Solve A^T P + P A = -Q via the vectorized n^2-dimensional linear system.
Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

// Companion matrix with last row l^T and shift superdiagonal.
Eigen::MatrixXd companion_matrix(const Eigen::VectorXd& l);

}  // namespace sandwich
