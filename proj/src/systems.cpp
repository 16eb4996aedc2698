#include "fbsyn/systems.hpp"

#include <cmath>
#include <stdexcept>

#include "fbsyn/errors.hpp"
#include "fbsyn/spectral.hpp"

namespace fbsyn {

Eigen::VectorXd DynamicalSystem::eval_f(const Eigen::VectorXd& y) const {
  if (y.size() != n) throw std::invalid_argument(name + ": state has wrong dimension");
  Eigen::VectorXd f = drift(y);
  if (!f.allFinite()) throw NumericalOverflowError(name + ": drift evaluation overflowed", y);
  return f;
}

Eigen::MatrixXd DynamicalSystem::eval_jacobian(const Eigen::VectorXd& y) const {
  if (y.size() != n) throw std::invalid_argument(name + ": state has wrong dimension");
  return drift_jacobian(y);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> DynamicalSystem::linearization() const {
  return {drift_jacobian(Eigen::VectorXd::Zero(n)), control_matrix};
}

namespace {

// Installs nonlinear_part = f(y) - Df(0) y once drift and jacobian are set.
void attach_nonlinear_part(DynamicalSystem& sys) {
  const Eigen::MatrixXd A = sys.drift_jacobian(Eigen::VectorXd::Zero(sys.n));
  auto drift = sys.drift;
  sys.nonlinear_part = [drift, A](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return drift(y) - A * y;
  };
}

}  // namespace

DynamicalSystem make_lc_circuit() {
  DynamicalSystem sys;
  sys.name = "lc_circuit";
  sys.n = 3;
  sys.m = 1;
  Eigen::MatrixXd A(3, 3);
  A << 0, 1, -1,  //
      -1, 0, 0,   //
      1, 0, 0;
  sys.drift = [A](const Eigen::VectorXd& y) -> Eigen::VectorXd { return A * y; };
  sys.drift_jacobian = [A](const Eigen::VectorXd&) { return A; };
  sys.control_matrix = Eigen::MatrixXd::Zero(3, 1);
  sys.control_matrix(1, 0) = 1.0;
  sys.output_matrix = Eigen::MatrixXd::Identity(3, 3);
  attach_nonlinear_part(sys);
  return sys;
}

DynamicalSystem make_vanderpol() {
  DynamicalSystem sys;
  sys.name = "vanderpol";
  sys.n = 2;
  sys.m = 1;
  sys.drift = [](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    const double y1 = y(0), y2 = y(1);
    Eigen::VectorXd f(2);
    f(0) = y2;
    f(1) = -y1 + 1.5 * y2 + (-1.5 * y1 * y1 * y2 - y1 + 0.8 * y1 * y1 * y1);
    return f;
  };
  sys.drift_jacobian = [](const Eigen::VectorXd& y) -> Eigen::MatrixXd {
    const double y1 = y(0), y2 = y(1);
    Eigen::MatrixXd J(2, 2);
    J << 0, 1,  //
        -2.0 - 3.0 * y1 * y2 + 2.4 * y1 * y1, 1.5 - 1.5 * y1 * y1;
    return J;
  };
  sys.control_matrix = Eigen::MatrixXd::Zero(2, 1);
  sys.control_matrix(1, 0) = 1.0;
  sys.output_matrix = Eigen::MatrixXd::Zero(2, 2);
  sys.output_matrix(0, 0) = 1.0;  // Q = (1,0)^T (1,0)
  attach_nonlinear_part(sys);
  return sys;
}

DynamicalSystem make_burgers(int N, double nu, double delta, int p,
                             std::pair<double, double> omega) {
  if (N < 3) throw std::invalid_argument("make_burgers: N must be >= 3");
  if (p != 1 && p != 3) throw std::invalid_argument("make_burgers: p must be 1 or 3");
  if (!(omega.first < omega.second))
    throw std::invalid_argument("make_burgers: omega must be a nonempty open interval");

  const SpectralGrid grid(N);
  const int n = N - 1;
  const Eigen::MatrixXd D2_full = grid.D * grid.D;
  // Homogeneous Dirichlet: restrict both derivative matrices to interior nodes.
  const Eigen::MatrixXd Dx = grid.D.block(1, 1, n, n);
  const Eigen::MatrixXd Dxx = D2_full.block(1, 1, n, n);

  DynamicalSystem sys;
  sys.name = "burgers";
  sys.n = n;
  sys.m = 1;
  sys.drift = [Dxx, Dx, nu, delta, p](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    Eigen::VectorXd f = nu * (Dxx * y) + y.cwiseProduct(Dx * y);
    if (delta != 0.0) f += delta * y.array().pow(p).matrix();
    return f;
  };
  sys.drift_jacobian = [Dxx, Dx, nu, delta, p](const Eigen::VectorXd& y) -> Eigen::MatrixXd {
    Eigen::MatrixXd J = nu * Dxx + Eigen::MatrixXd((Dx * y).asDiagonal()) +
                        y.asDiagonal() * Dx;
    if (delta != 0.0)
      J += (delta * p * y.array().pow(p - 1)).matrix().asDiagonal();
    return J;
  };
  sys.control_matrix = Eigen::MatrixXd::Zero(n, 1);
  for (int j = 1; j < N; ++j) {
    const double x = grid.nodes(j);
    if (x > omega.first && x < omega.second) sys.control_matrix(j - 1, 0) = 1.0;
  }
  sys.output_matrix = Eigen::MatrixXd::Zero(n, n);
  for (int j = 1; j < N; ++j) sys.output_matrix(j - 1, j - 1) = std::sqrt(grid.cc_weights(j));
  attach_nonlinear_part(sys);
  return sys;
}

DynamicalSystem make_system(const std::string& name, int N, double nu, double delta, int p,
                            std::pair<double, double> omega) {
  if (name == "lc_circuit") return make_lc_circuit();
  if (name == "vanderpol") return make_vanderpol();
  if (name == "burgers") return make_burgers(N, nu, delta, p, omega);
  throw std::invalid_argument("unknown system: " + name);
}

}  // namespace fbsyn
