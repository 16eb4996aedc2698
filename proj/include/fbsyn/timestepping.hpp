#ifndef FBSYN_TIMESTEPPING_HPP
#define FBSYN_TIMESTEPPING_HPP

#include <string>

#include <Eigen/Core>

#include "fbsyn/feedback.hpp"
#include "fbsyn/systems.hpp"

namespace fbsyn {

enum class TrajectoryStatus { Completed, BlewUp, NewtonFailed };

struct IntegratorOptions {
  double newton_tol = 1e-12;       // relative residual tolerance per step
  int newton_max_iters = 50;
  double blowup_threshold = 1e6;   // max-norm bound on accepted states
};

/// Closed-loop trajectory on a uniform grid. states has one row per node;
/// on failure only rows 0..failure_step are present.
struct Trajectory {
  double T = 0.0;
  int n_steps = 0;
  double h = 0.0;
  Eigen::MatrixXd states;  // (#valid nodes) x n
  TrajectoryStatus status = TrajectoryStatus::Completed;
  int failure_step = -1;   // step index at which integration stopped

  bool completed() const { return status == TrajectoryStatus::Completed; }
};

/// Costates on the same grid as the underlying state trajectory;
/// costates.row(n_steps) is exactly zero.
struct AdjointTrajectory {
  double T = 0.0;
  int n_steps = 0;
  double h = 0.0;
  Eigen::MatrixXd costates;  // (n_steps+1) x n
};

/// Crank-Nicolson integration of  y' = f(y) + B F(y), each step solved by a
/// damped Newton iteration with an explicit Euler predictor. Deterministic:
/// identical inputs give bitwise-identical trajectories.
Trajectory integrate_closed_loop(const DynamicalSystem& system, const FeedbackLaw& law,
                                 const Eigen::VectorXd& y0, double T, int n_steps,
                                 const IntegratorOptions& opts = {});

/// Crank-Nicolson applied backward to the linear adjoint equation
///   -p' = M(t)^T p + s(t),  p(T) = 0,
/// with M = Df(y) + B D_yF(y) and s = Q^T Q y + beta D_yF(y)^T F(y),
/// coefficients evaluated at the stored state nodes.
AdjointTrajectory integrate_adjoint(const DynamicalSystem& system, const FeedbackLaw& law,
                                    const Trajectory& traj, const Eigen::MatrixXd& Q, double beta);

/// h * (v_0/2 + v_1 + ... + v_{K-1} + v_K/2).
double trapezoid(const Eigen::VectorXd& values, double h);

/// CSV export: header t,y1..yn[,u1..um], 17 significant digits per entry.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const FeedbackLaw* law = nullptr);

}  // namespace fbsyn

#endif
