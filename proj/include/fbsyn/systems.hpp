#ifndef FBSYN_SYSTEMS_HPP
#define FBSYN_SYSTEMS_HPP

#include <functional>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace fbsyn {

/// Autonomous control-affine system  y' = f(y) + B u  with quadratic output
/// weight Q. The drift satisfies f(0) = 0 for every benchmark constructed
/// here. Immutable after construction; safe to share between threads.
struct DynamicalSystem {
  int n = 0;  // state dimension
  int m = 0;  // control dimension
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> drift;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> drift_jacobian;
  Eigen::MatrixXd control_matrix;  // B, n x m
  Eigen::MatrixXd output_matrix;   // Q, n x n, positive semi-definite
  /// f(y) - Df(0) y; the correction used by the power-series controller.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> nonlinear_part;
  std::string name;

  /// Evaluates the drift and rejects non-finite results.
  Eigen::VectorXd eval_f(const Eigen::VectorXd& y) const;

  Eigen::MatrixXd eval_jacobian(const Eigen::VectorXd& y) const;

  /// (A, B) with A = Df(0).
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> linearization() const;
};

/// LC circuit: two unit inductors and a unit capacitor, voltage input on the
/// second equation. Linear, skew-symmetric drift, Q = I.
DynamicalSystem make_lc_circuit();

/// Van-der-Pol oscillator with a destabilizing cubic term, written as a
/// first-order system with control entering the second component. Q = e1 e1^T.
DynamicalSystem make_vanderpol();

/// Chebyshev-collocated viscous Burgers equation with reaction term delta*y^p
/// on (-1,1), homogeneous Dirichlet, control acting on the subinterval omega.
/// State dimension is N-1 (interior nodes); Q = diag(sqrt(cc weights)).
DynamicalSystem make_burgers(int N, double nu, double delta, int p,
                             std::pair<double, double> omega);

/// Constructs a benchmark by name: "lc_circuit", "vanderpol" or "burgers"
/// (the latter with the given parameters).
DynamicalSystem make_system(const std::string& name, int N = 14, double nu = 0.2,
                            double delta = 2.0, int p = 1,
                            std::pair<double, double> omega = {-0.5, -0.2});

}  // namespace fbsyn

#endif
