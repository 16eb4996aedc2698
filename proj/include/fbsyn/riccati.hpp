#ifndef FBSYN_RICCATI_HPP
#define FBSYN_RICCATI_HPP

#include <Eigen/Core>

namespace fbsyn {

struct CareSolution {
  Eigen::MatrixXd Pi;                       // symmetric PSD solution
  double residual_norm = 0.0;               // Frobenius norm of the ARE residual
  double closed_loop_spectrum_abscissa = 0.0;  // max Re eig(A - (1/beta) B B^T Pi)
};

/// Frobenius norm of  A^T Pi + Pi A - (1/beta) Pi B B^T Pi + Q.
double care_residual(const Eigen::MatrixXd& Pi, const Eigen::MatrixXd& A,
                     const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q, double beta);

/// Solves the continuous-time algebraic Riccati equation
///   A^T Pi + Pi A - (1/beta) Pi B B^T Pi + Q = 0
/// via the stable invariant subspace of the associated Hamiltonian matrix,
/// followed by one Newton-Kleinman refinement step. Intended for dense
/// problems of modest dimension. Throws RiccatiError when no stable
/// n-dimensional subspace exists or the residual tolerance
/// 1e-8 * max(1, ||Q||_F) cannot be met.
CareSolution solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                        const Eigen::MatrixXd& Q, double beta);

}  // namespace fbsyn

#endif
