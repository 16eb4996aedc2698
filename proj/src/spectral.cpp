#include "fbsyn/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace fbsyn {

Eigen::VectorXd chebyshev_nodes(int N) {
  if (N < 1) throw std::invalid_argument("chebyshev_nodes: N must be >= 1");
  Eigen::VectorXd x(N + 1);
  for (int j = 0; j <= N; ++j) x(j) = std::cos(j * M_PI / N);
  return x;
}

Eigen::MatrixXd chebyshev_diff_matrix(int N) {
  if (N < 1) throw std::invalid_argument("chebyshev_diff_matrix: N must be >= 1");
  const Eigen::VectorXd x = chebyshev_nodes(N);
  Eigen::VectorXd c(N + 1);
  for (int j = 0; j <= N; ++j) c(j) = (j == 0 || j == N) ? 2.0 : 1.0;

  Eigen::MatrixXd D(N + 1, N + 1);
  for (int i = 0; i <= N; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j <= N; ++j) {
      if (i == j) continue;
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      D(i, j) = (c(i) / c(j)) * sign / (x(i) - x(j));
      row_sum += D(i, j);
    }
    D(i, i) = -row_sum;  // rows annihilate constants
  }
  return D;
}

Eigen::VectorXd clenshaw_curtis_weights(int N) {
  if (N < 1) throw std::invalid_argument("clenshaw_curtis_weights: N must be >= 1");
  Eigen::VectorXd w(N + 1);
  if (N == 1) {
    w(0) = w(1) = 1.0;
    return w;
  }
  const double boundary = (N % 2 == 0) ? 1.0 / (double(N) * N - 1.0) : 1.0 / (double(N) * N);
  w(0) = w(N) = boundary;
  for (int j = 1; j < N; ++j) {
    const double theta = j * M_PI / N;
    double v = 1.0;
    if (N % 2 == 0) {
      for (int k = 1; k <= N / 2 - 1; ++k) v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
      v -= std::cos(N * theta) / (double(N) * N - 1.0);
    } else {
      for (int k = 1; k <= (N - 1) / 2; ++k) v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
    }
    w(j) = 2.0 * v / N;
  }
  return w;
}

SpectralGrid::SpectralGrid(int degree)
    : N(degree),
      nodes(chebyshev_nodes(degree)),
      D(chebyshev_diff_matrix(degree)),
      cc_weights(clenshaw_curtis_weights(degree)) {}

}  // namespace fbsyn
