#include "fbsyn/timestepping.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <stdexcept>

#include <Eigen/LU>

#include "fbsyn/errors.hpp"

namespace fbsyn {

namespace {

Eigen::VectorXd closed_loop_rhs(const DynamicalSystem& system, const FeedbackLaw& law,
                                const Eigen::VectorXd& y) {
  return system.eval_f(y) + system.control_matrix * law.eval(y);
}

Eigen::MatrixXd closed_loop_jacobian(const DynamicalSystem& system, const FeedbackLaw& law,
                                     const Eigen::VectorXd& y) {
  return system.eval_jacobian(y) + system.control_matrix * law.state_jacobian(y);
}

}  // namespace

Trajectory integrate_closed_loop(const DynamicalSystem& system, const FeedbackLaw& law,
                                 const Eigen::VectorXd& y0, double T, int n_steps,
                                 const IntegratorOptions& opts) {
  if (n_steps < 1) throw std::invalid_argument("integrate_closed_loop: n_steps must be >= 1");
  if (T <= 0) throw std::invalid_argument("integrate_closed_loop: T must be positive");
  if (!y0.allFinite()) throw std::invalid_argument("integrate_closed_loop: y0 must be finite");
  if (y0.size() != system.n) throw std::invalid_argument("integrate_closed_loop: y0 dimension mismatch");

  Trajectory traj;
  traj.T = T;
  traj.n_steps = n_steps;
  traj.h = T / n_steps;
  const double h = traj.h;
  const Eigen::Index n = system.n;

  Eigen::MatrixXd states(n_steps + 1, n);
  states.row(0) = y0.transpose();

  auto finish_partial = [&](TrajectoryStatus status, int step, int valid_nodes) {
    traj.status = status;
    traj.failure_step = step;
    traj.states = states.topRows(valid_nodes);
    return traj;
  };

  if (y0.lpNorm<Eigen::Infinity>() > opts.blowup_threshold)
    return finish_partial(TrajectoryStatus::BlewUp, 0, 1);

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd y = y0;
  Eigen::VectorXd Gy = closed_loop_rhs(system, law, y);

  enum class StepOutcome { Ok, NoConvergence, Escaped };
  // State that crossed the blow-up threshold; recorded at the flagged node so
  // the partial trajectory shows the escape (finite: detection precedes
  // overflow).
  Eigen::VectorXd escape_state;

  // One damped-Newton Crank-Nicolson step of length hs from (y, Gy);
  // on success the pair is advanced in place.
  auto cn_step = [&](Eigen::VectorXd& y_io, Eigen::VectorXd& Gy_io, double hs) -> StepOutcome {
    // Overflow at a trial iterate only disqualifies that iterate; it says
    // nothing about the trajectory itself.
    auto try_rhs = [&](const Eigen::VectorXd& at, Eigen::VectorXd& G_out) -> bool {
      try {
        G_out = closed_loop_rhs(system, law, at);
        return true;
      } catch (const NumericalOverflowError&) {
        return false;
      }
    };

    // R(z) = z - y - (hs/2)(G(y) + G(z)); predictor: explicit Euler, used only
    // when the step is in the asymptotic regime -- a stiff overshoot can land
    // in the attraction basin of a spurious large-norm root of the CN map.
    Eigen::VectorXd z = y_io;
    Eigen::VectorXd Gz = Gy_io;
    if (hs * Gy_io.lpNorm<Eigen::Infinity>() <= 1.0 + y_io.lpNorm<Eigen::Infinity>()) {
      Eigen::VectorXd z_pred = y_io + hs * Gy_io;
      Eigen::VectorXd G_pred;
      if (z_pred.allFinite() && z_pred.lpNorm<Eigen::Infinity>() <= opts.blowup_threshold &&
          try_rhs(z_pred, G_pred)) {
        z = std::move(z_pred);
        Gz = std::move(G_pred);
      }
    }

    bool converged = false;
    Eigen::VectorXd R = z - y_io - 0.5 * hs * (Gy_io + Gz);
    double res_norm = R.norm();
    for (int it = 0; it < opts.newton_max_iters; ++it) {
      if (res_norm <= opts.newton_tol * (1.0 + z.norm())) {
        converged = true;
        break;
      }
      Eigen::MatrixXd J;
      try {
        J = I - 0.5 * hs * closed_loop_jacobian(system, law, z);
      } catch (const NumericalOverflowError&) {
        break;
      }
      const Eigen::VectorXd d = Eigen::PartialPivLU<Eigen::MatrixXd>(J).solve(-R);
      if (!d.allFinite()) break;
      // Residual-based halving damping with a fixed schedule.
      double alpha = 1.0;
      bool improved = false;
      Eigen::VectorXd z_new, G_new, R_new;
      double res_new = 0.0;
      for (int cut = 0; cut < 30; ++cut) {
        z_new = z + alpha * d;
        if (z_new.lpNorm<Eigen::Infinity>() > 10.0 * opts.blowup_threshold ||
            !try_rhs(z_new, G_new)) {
          alpha *= 0.5;
          continue;
        }
        R_new = z_new - y_io - 0.5 * hs * (Gy_io + G_new);
        res_new = R_new.norm();
        if (res_new < (1.0 - 0.25 * alpha) * res_norm ||
            res_new <= opts.newton_tol * (1.0 + z_new.norm())) {
          improved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!improved) break;
      z = z_new;
      Gz = G_new;
      R = R_new;
      res_norm = res_new;
    }
    if (converged && res_norm > opts.newton_tol * (1.0 + z.norm())) converged = false;
    if (converged) {
      // Reject roots with implausibly large jumps: spurious CN branches scale
      // like O(1/hs), so bisecting the step separates them from fast-but-real
      // transients (including genuine blow-up, which marches geometrically).
      if ((z - y_io).lpNorm<Eigen::Infinity>() > 2.0 * (1.0 + y_io.lpNorm<Eigen::Infinity>()))
        return StepOutcome::NoConvergence;
      if (z.lpNorm<Eigen::Infinity>() > opts.blowup_threshold) {
        escape_state = z;
        return StepOutcome::Escaped;
      }
      y_io = z;
      Gy_io = Gz;
      return StepOutcome::Ok;
    }
    return StepOutcome::NoConvergence;
  };

  // Grid step with recursive bisection fallback. Near a finite-time blow-up
  // the implicit equation loses solvability before the state crosses the
  // threshold; refining the local step lets the state march up to the
  // threshold so that genuine blow-ups are classified as such rather than as
  // Newton failures. The substep budget bounds the work on pathological steps.
  constexpr int kMaxDepth = 45;
  int substep_budget = 0;
  std::function<StepOutcome(Eigen::VectorXd&, Eigen::VectorXd&, double, int)> advance =
      [&](Eigen::VectorXd& y_io, Eigen::VectorXd& Gy_io, double hs, int depth) -> StepOutcome {
    if (--substep_budget < 0) return StepOutcome::NoConvergence;
    const StepOutcome direct = cn_step(y_io, Gy_io, hs);
    if (direct != StepOutcome::NoConvergence) return direct;
    if (depth >= kMaxDepth) return StepOutcome::NoConvergence;
    const StepOutcome first = advance(y_io, Gy_io, 0.5 * hs, depth + 1);
    if (first != StepOutcome::Ok) return first;
    return advance(y_io, Gy_io, 0.5 * hs, depth + 1);
  };

  for (int k = 0; k < n_steps; ++k) {
    substep_budget = 10000;
    const StepOutcome outcome = advance(y, Gy, h, 0);
    if (outcome == StepOutcome::Escaped) {
      states.row(k + 1) = escape_state.transpose();
      return finish_partial(TrajectoryStatus::BlewUp, k + 1, k + 2);
    }
    if (outcome == StepOutcome::NoConvergence)
      return finish_partial(TrajectoryStatus::NewtonFailed, k + 1, k + 1);
    states.row(k + 1) = y.transpose();
  }

  traj.states = std::move(states);
  traj.status = TrajectoryStatus::Completed;
  return traj;
}

AdjointTrajectory integrate_adjoint(const DynamicalSystem& system, const FeedbackLaw& law,
                                    const Trajectory& traj, const Eigen::MatrixXd& Q, double beta) {
  if (!traj.completed())
    throw std::invalid_argument("integrate_adjoint: state trajectory did not complete");
  const int K = traj.n_steps;
  const double h = traj.h;
  const Eigen::Index n = system.n;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd QtQ = Q.transpose() * Q;

  AdjointTrajectory adj;
  adj.T = traj.T;
  adj.n_steps = K;
  adj.h = h;
  adj.costates = Eigen::MatrixXd::Zero(K + 1, n);

  auto coeffs = [&](int k, Eigen::MatrixXd& M, Eigen::VectorXd& s) {
    const Eigen::VectorXd y = traj.states.row(k).transpose();
    const Eigen::MatrixXd DF = law.state_jacobian(y);
    M = system.eval_jacobian(y) + system.control_matrix * DF;
    s = QtQ * y + beta * DF.transpose() * law.eval(y);
  };

  Eigen::MatrixXd M_next;
  Eigen::VectorXd s_next;
  coeffs(K, M_next, s_next);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);

  for (int k = K - 1; k >= 0; --k) {
    Eigen::MatrixXd M_k;
    Eigen::VectorXd s_k;
    coeffs(k, M_k, s_k);
    const Eigen::MatrixXd lhs = I - 0.5 * h * M_k.transpose();
    const Eigen::VectorXd rhs =
        (I + 0.5 * h * M_next.transpose()) * p + 0.5 * h * (s_k + s_next);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
    p = lu.solve(rhs);
    if (!p.allFinite())
      throw LinearSolveError("adjoint step matrix singular at step " + std::to_string(k) +
                             " (h=" + std::to_string(h) + ")");
    adj.costates.row(k) = p.transpose();
    M_next = std::move(M_k);
    s_next = std::move(s_k);
  }
  return adj;
}

double trapezoid(const Eigen::VectorXd& values, double h) {
  if (values.size() < 2) throw std::invalid_argument("trapezoid: need at least two samples");
  if (h <= 0) throw std::invalid_argument("trapezoid: h must be positive");
  return h * (values.sum() - 0.5 * (values(0) + values(values.size() - 1)));
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const FeedbackLaw* law) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << std::setprecision(17);
  const Eigen::Index n = traj.states.cols();
  out << "t";
  for (Eigen::Index j = 0; j < n; ++j) out << ",y" << (j + 1);
  if (law)
    for (int j = 0; j < law->control_dim(); ++j) out << ",u" << (j + 1);
  out << "\n";
  for (Eigen::Index k = 0; k < traj.states.rows(); ++k) {
    out << k * traj.h;
    for (Eigen::Index j = 0; j < n; ++j) out << "," << traj.states(k, j);
    if (law) {
      const Eigen::VectorXd u = law->eval(traj.states.row(k).transpose());
      for (Eigen::Index j = 0; j < u.size(); ++j) out << "," << u(j);
    }
    out << "\n";
  }
}

}  // namespace fbsyn
