#include "sandwich/matrix_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace sandwich {

Eigen::MatrixXd expm(const Eigen::MatrixXd& A, double tol) {
  if (A.rows() != A.cols()) throw std::invalid_argument("expm: square matrix required");
  const Eigen::Index n = A.rows();
  const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  double scale = 1.0;
  while (norm * scale > 0.5) {
    scale *= 0.5;
    ++s;
  }
  const Eigen::MatrixXd As = A * scale;
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd sum = term;
  for (int k = 1; k < 60; ++k) {
    term = (term * As) / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < tol) break;
  }
  for (int k = 0; k < s; ++k) sum = sum * sum;
  return sum;
}

Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  if (A.rows() != A.cols() || Q.rows() != Q.cols() || A.rows() != Q.rows())
    throw std::invalid_argument("lyapunov_solve: dimension mismatch");
  const Eigen::Index n = A.rows();
  // vec(A^T P) = (I kron A^T) vec(P), vec(P A) = (A^T kron I) vec(P)
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n * n, n * n);
  const Eigen::MatrixXd At = A.transpose();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      M.block(i * n, j * n, n, n) += I(i, j) * At;   // I kron A^T
      M.block(i * n, j * n, n, n) += At(i, j) * I;   // A^T kron I
    }
  Eigen::VectorXd q(n * n);
  for (Eigen::Index j = 0; j < n; ++j) q.segment(j * n, n) = -Q.col(j);
  const Eigen::VectorXd p = M.partialPivLu().solve(q);
  Eigen::MatrixXd P(n, n);
  for (Eigen::Index j = 0; j < n; ++j) P.col(j) = p.segment(j * n, n);
  return 0.5 * (P + P.transpose());
}

Eigen::MatrixXd companion_matrix(const Eigen::VectorXd& l) {
  const Eigen::Index n = l.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
  A.row(n - 1) = l.transpose();
  return A;
}

}  // namespace sandwich
