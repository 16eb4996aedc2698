#include "fbsyn/riccati.hpp"

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "fbsyn/errors.hpp"

namespace fbsyn {

double care_residual(const Eigen::MatrixXd& Pi, const Eigen::MatrixXd& A,
                     const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q, double beta) {
  const Eigen::MatrixXd R = A.transpose() * Pi + Pi * A -
                            (1.0 / beta) * Pi * B * B.transpose() * Pi + Q;
  return R.norm();
}

namespace {

// Solves A_c^T X + X A_c + C = 0 through the n^2 x n^2 Kronecker system.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& Ac, const Eigen::MatrixXd& C) {
  const Eigen::Index n = Ac.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd K(n * n, n * n);
  // vec(A^T X + X A) = (I (x) A^T + A^T (x) I) vec(X), column-major vec.
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      K.block(j * n, i * n, n, n) =
          i == j ? Eigen::MatrixXd(Ac.transpose() + Ac(i, j) * I) : Eigen::MatrixXd(Ac(i, j) * I);
  Eigen::VectorXd rhs(n * n);
  for (Eigen::Index j = 0; j < n; ++j) rhs.segment(j * n, n) = -C.col(j);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
  Eigen::VectorXd x = lu.solve(rhs);
  Eigen::MatrixXd X(n, n);
  for (Eigen::Index j = 0; j < n; ++j) X.col(j) = x.segment(j * n, n);
  return X;
}

}  // namespace

CareSolution solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                        const Eigen::MatrixXd& Q, double beta) {
  if (beta <= 0) throw std::invalid_argument("solve_care: beta must be positive");
  const Eigen::Index n = A.rows();
  const Eigen::MatrixXd BBt = B * B.transpose();

  Eigen::MatrixXd H(2 * n, 2 * n);
  H << A, -(1.0 / beta) * BBt, -Q, -A.transpose();

  Eigen::EigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success) throw RiccatiError("Hamiltonian eigendecomposition failed");

  // Stable invariant subspace: eigenvectors with Re(lambda) < 0.
  std::vector<Eigen::Index> stable;
  for (Eigen::Index i = 0; i < 2 * n; ++i)
    if (es.eigenvalues()(i).real() < 0) stable.push_back(i);
  if (static_cast<Eigen::Index>(stable.size()) != n)
    throw RiccatiError("Hamiltonian has " + std::to_string(stable.size()) +
                       " stable eigenvalues, expected " + std::to_string(n) +
                       "; (A,B) may not be stabilizable");

  Eigen::MatrixXcd X1(n, n), X2(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    X1.col(k) = es.eigenvectors().col(stable[k]).head(n);
    X2.col(k) = es.eigenvectors().col(stable[k]).tail(n);
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(X1);
  if (!lu.isInvertible()) throw RiccatiError("stable subspace basis X1 is singular");
  const Eigen::MatrixXcd Pic = X2 * lu.inverse();

  const double imag_norm = Pic.imag().norm();
  if (imag_norm > 1e-10 * std::max(1.0, Pic.real().norm()))
    throw RiccatiError("Riccati solution has non-negligible imaginary part");
  Eigen::MatrixXd Pi = Pic.real();
  Pi = 0.5 * (Pi + Pi.transpose());

  // One Newton-Kleinman step to push the residual to tolerance.
  const Eigen::MatrixXd Ac_nk = A - (1.0 / beta) * BBt * Pi;
  const Eigen::MatrixXd C = Q + (1.0 / beta) * Pi * BBt * Pi;
  Eigen::MatrixXd Pi_ref = solve_lyapunov(Ac_nk, C);
  Pi_ref = 0.5 * (Pi_ref + Pi_ref.transpose());
  if (Pi_ref.allFinite() && care_residual(Pi_ref, A, B, Q, beta) < care_residual(Pi, A, B, Q, beta))
    Pi = Pi_ref;

  CareSolution sol;
  sol.Pi = Pi;
  sol.residual_norm = care_residual(Pi, A, B, Q, beta);
  const double tol = 1e-8 * std::max(1.0, Q.norm());
  if (sol.residual_norm > tol)
    throw RiccatiError("Riccati residual " + std::to_string(sol.residual_norm) +
                       " exceeds tolerance " + std::to_string(tol));

  const Eigen::MatrixXd Ac = A - (1.0 / beta) * BBt * Pi;
  Eigen::EigenSolver<Eigen::MatrixXd> cl(Ac);
  sol.closed_loop_spectrum_abscissa = cl.eigenvalues().real().maxCoeff();
  return sol;
}

}  // namespace fbsyn
