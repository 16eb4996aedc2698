#ifndef FBSYN_SPECTRAL_HPP
#define FBSYN_SPECTRAL_HPP

#include <Eigen/Core>

namespace fbsyn {

/// Chebyshev collocation nodes x_j = cos(j*pi/N), j = 0..N (decreasing from 1 to -1).
Eigen::VectorXd chebyshev_nodes(int N);

/// Dense first-derivative collocation matrix on chebyshev_nodes(N).
/// Diagonal entries use the negative-sum trick so each row sums to zero.
Eigen::MatrixXd chebyshev_diff_matrix(int N);

/// Clenshaw-Curtis quadrature weights on chebyshev_nodes(N); exact for
/// polynomials up to degree N on [-1, 1].
Eigen::VectorXd clenshaw_curtis_weights(int N);

/// Precomputed collocation data for one polynomial degree.
struct SpectralGrid {
  int N;
  Eigen::VectorXd nodes;       // N+1 entries, decreasing
  Eigen::MatrixXd D;           // (N+1) x (N+1) first-derivative matrix
  Eigen::VectorXd cc_weights;  // N+1 quadrature weights

  explicit SpectralGrid(int degree);
};

}  // namespace fbsyn

#endif
