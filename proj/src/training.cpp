#include "fbsyn/training.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <Eigen/LU>
#include <json.hpp>

#include "fbsyn/errors.hpp"
#include "fbsyn/feedback.hpp"

namespace fbsyn {

void EnsembleConfig::validate(int state_dim) const {
  if (initial_conditions.empty())
    throw std::invalid_argument("ensemble: need at least one initial condition");
  if (weights.size() != static_cast<Eigen::Index>(initial_conditions.size()))
    throw std::invalid_argument("ensemble: weights/initial_conditions size mismatch");
  if ((weights.array() <= 0).any()) throw std::invalid_argument("ensemble: weights must be positive");
  if (std::abs(weights.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("ensemble: weights must sum to 1");
  for (const auto& y0 : initial_conditions)
    if (y0.size() != state_dim) throw std::invalid_argument("ensemble: initial condition dimension mismatch");
  if (beta < 0) throw std::invalid_argument("ensemble: beta must be >= 0");
  if (T <= 0) throw std::invalid_argument("ensemble: T must be positive");
  if (n_steps < 1) throw std::invalid_argument("ensemble: n_steps must be >= 1");
  if (alpha_R < 0) throw std::invalid_argument("ensemble: alpha_R must be >= 0");
  if (s_min <= 0 || s_max < s_min) throw std::invalid_argument("ensemble: invalid stepsize bounds");
  if (max_iters < 0) throw std::invalid_argument("ensemble: max_iters must be >= 0");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::GradTol: return "grad_tol";
    case Termination::MaxIters: return "max_iters";
    case Termination::Stalled: return "stalled";
  }
  return "max_iters";
}

namespace {

double regularizer(const NetworkParams& theta, double alpha_R) {
  double s = 0.0;
  for (std::size_t i = 1; i < theta.weights.size(); ++i) s += theta.weights[i].squaredNorm();
  return alpha_R * s;
}

// grad G_R = 2 alpha_R (0, 0, W_2, 0, ..., W_L, 0).
void add_regularizer_gradient(const NetworkParams& theta, double alpha_R, NetworkParams& grad) {
  for (std::size_t i = 1; i < theta.weights.size(); ++i)
    grad.weights[i] += 2.0 * alpha_R * theta.weights[i];
}

struct PerIcResult {
  double cost = 0.0;                 // +inf on blow-up
  bool blew_up = false;
  NetworkParams grad;                // empty unless gradient was requested
};

// Forward solve plus (optionally) the discrete adjoint sweep for one initial
// condition. The sweep solves the stationarity system of the time-discrete
// Lagrangian, so the accumulated gradient is exact for the discrete objective.
PerIcResult run_ic(const DynamicalSystem& system, const NetworkParams& theta,
                   const EnsembleConfig& cfg, const Eigen::VectorXd& y0, bool want_gradient) {
  NetworkFeedback law(theta);
  const Trajectory traj = integrate_closed_loop(system, law, y0, cfg.T, cfg.n_steps, cfg.integrator);
  PerIcResult out;
  if (traj.status == TrajectoryStatus::NewtonFailed)
    throw NewtonFailureError("Newton iteration failed in closed-loop solve", traj.failure_step);
  if (traj.status == TrajectoryStatus::BlewUp) {
    out.cost = std::numeric_limits<double>::infinity();
    out.blew_up = true;
    return out;
  }

  const int K = traj.n_steps;
  const double h = traj.h;
  const Eigen::Index n = system.n;
  const Eigen::MatrixXd& Q = system.output_matrix;
  const Eigen::MatrixXd QtQ = Q.transpose() * Q;
  const Eigen::MatrixXd& B = system.control_matrix;

  std::vector<Eigen::VectorXd> F(K + 1);
  std::vector<Eigen::MatrixXd> DF;
  if (want_gradient) DF.resize(K + 1);
  double cost = 0.0;
  for (int k = 0; k <= K; ++k) {
    const Eigen::VectorXd y = traj.states.row(k).transpose();
    F[k] = nn_forward(theta, y);
    if (want_gradient) DF[k] = nn_jac_x(theta, y);
    const double c = (k == 0 || k == K) ? 0.5 : 1.0;
    cost += 0.5 * h * c * ((Q * y).squaredNorm() + cfg.beta * F[k].squaredNorm());
  }
  out.cost = cost;
  if (!want_gradient) return out;

  out.grad = theta.zeros_like();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd p_next = Eigen::VectorXd::Zero(n);  // multiplier beyond the last node
  Eigen::VectorXd v_total = Eigen::VectorXd::Zero(system.m);
  for (int k = K; k >= 1; --k) {
    const Eigen::VectorXd y = traj.states.row(k).transpose();
    const Eigen::MatrixXd M = system.eval_jacobian(y) + B * DF[k];
    const double c = (k == K) ? 0.5 : 1.0;
    const Eigen::VectorXd g = QtQ * y + cfg.beta * DF[k].transpose() * F[k];
    const Eigen::MatrixXd lhs = I - 0.5 * h * M.transpose();
    const Eigen::VectorXd rhs = (I + 0.5 * h * M.transpose()) * p_next + h * c * g;
    const Eigen::VectorXd p = Eigen::PartialPivLU<Eigen::MatrixXd>(lhs).solve(rhs);
    if (!p.allFinite())
      throw LinearSolveError("adjoint sweep produced non-finite costate at step " + std::to_string(k));
    // Node k couples to the interval multipliers on both sides.
    const Eigen::VectorXd v = B.transpose() * (0.5 * h * (p + p_next)) + h * c * cfg.beta * F[k];
    nn_vjp_theta_accumulate(theta, y, v, +1.0, out.grad);
    v_total += v;
    p_next = p;
  }
  const Eigen::VectorXd y0_node = traj.states.row(0).transpose();
  const Eigen::VectorXd v0 = B.transpose() * (0.5 * h * p_next) + h * 0.5 * cfg.beta * F[0];
  nn_vjp_theta_accumulate(theta, y0_node, v0, +1.0, out.grad);
  v_total += v0;
  // Shift part of D_theta[net(x) - net(0)]: one batched backward pass at 0.
  nn_vjp_theta_accumulate(theta, Eigen::VectorXd::Zero(n), v_total, -1.0, out.grad);
  return out;
}

void parallel_over_ics(std::size_t count, int n_threads, const std::function<void(std::size_t)>& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  unsigned workers = n_threads > 0 ? static_cast<unsigned>(n_threads) : (hw ? hw : 1);
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> futures;
  futures.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    futures.push_back(std::async(std::launch::async, fn, i));
  std::exception_ptr first;
  for (auto& f : futures) {
    try {
      f.get();
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace

double ensemble_objective(const DynamicalSystem& system, const NetworkParams& theta,
                          const EnsembleConfig& cfg) {
  cfg.validate(system.n);
  const std::size_t N = cfg.initial_conditions.size();
  std::vector<PerIcResult> results(N);
  parallel_over_ics(N, cfg.n_threads, [&](std::size_t i) {
    results[i] = run_ic(system, theta, cfg, cfg.initial_conditions[i], false);
  });
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    if (results[i].blew_up) return std::numeric_limits<double>::infinity();
    total += cfg.weights(static_cast<Eigen::Index>(i)) * results[i].cost;
  }
  return total + regularizer(theta, cfg.alpha_R);
}

std::pair<NetworkParams, double> ensemble_gradient(const DynamicalSystem& system,
                                                   const NetworkParams& theta,
                                                   const EnsembleConfig& cfg) {
  cfg.validate(system.n);
  const std::size_t N = cfg.initial_conditions.size();
  std::vector<PerIcResult> results(N);
  parallel_over_ics(N, cfg.n_threads, [&](std::size_t i) {
    results[i] = run_ic(system, theta, cfg, cfg.initial_conditions[i], true);
  });
  for (std::size_t i = 0; i < N; ++i)
    if (results[i].blew_up)
      throw BlowUpError("trajectory blow-up for initial condition " + std::to_string(i),
                        static_cast<int>(i));
  NetworkParams grad = theta.zeros_like();
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) {  // fixed reduction order
    const double w = cfg.weights(static_cast<Eigen::Index>(i));
    param_add_scaled(grad, w, results[i].grad);
    total += w * results[i].cost;
  }
  add_regularizer_gradient(theta, cfg.alpha_R, grad);
  return {std::move(grad), total + regularizer(theta, cfg.alpha_R)};
}

double bb_stepsize(const NetworkParams& S, const NetworkParams& E, int variant, double s_min,
                   double s_max, bool paper_orientation) {
  const double se = param_dot(S, E);
  const double ss = param_dot(S, S);
  const double ee = param_dot(E, E);
  double raw;
  if (paper_orientation)
    raw = (variant == 1) ? se / ss : ee / se;
  else
    raw = (variant == 1) ? ss / se : se / ee;
  if (!std::isfinite(raw) || raw <= 0) return s_min;
  return std::max(s_min, std::min(raw, s_max));
}

TrainReport train(const DynamicalSystem& system, const NetworkParams& theta0,
                  const EnsembleConfig& cfg) {
  cfg.validate(system.n);
  theta0.validate();
  if (theta0.arch.widths.front() != system.n || theta0.arch.widths.back() != system.m)
    throw std::invalid_argument("train: network widths incompatible with system dimensions");

  TrainReport report;
  NetworkParams theta = project_admissible(theta0, cfg.eta1, cfg.eta2);

  NetworkParams grad;
  double objective;
  try {
    std::tie(grad, objective) = ensemble_gradient(system, theta, cfg);
  } catch (const BlowUpError& e) {
    throw UnrecoverableStartError(std::string("closed loop blows up at the initial parameters: ") +
                                  e.what());
  }
  double grad_norm = param_norm(grad);

  bool have_history = false;
  NetworkParams prev_theta, prev_grad;
  int consecutive_rejections = 0;
  report.termination = Termination::MaxIters;

  for (int k = 1; k <= cfg.max_iters; ++k) {
    if (grad_norm <= cfg.grad_tol) {
      report.termination = Termination::GradTol;
      break;
    }
    double s;
    if (!have_history) {
      s = cfg.s0;
    } else {
      const NetworkParams S = param_axpy(-1.0, prev_theta, theta);
      const NetworkParams E = param_axpy(-1.0, prev_grad, grad);
      const int variant = (k % 2 == 0) ? 1 : 2;
      s = bb_stepsize(S, E, variant, cfg.s_min, cfg.s_max, cfg.bb_paper_orientation);
    }

    bool accepted = false;
    int halvings = 0;
    NetworkParams trial, trial_grad;
    double trial_objective = 0.0;
    for (; halvings <= 20; ++halvings) {
      trial = project_admissible(param_axpy(-s, grad, theta), cfg.eta1, cfg.eta2);
      try {
        std::tie(trial_grad, trial_objective) = ensemble_gradient(system, trial, cfg);
        accepted = true;
        break;
      } catch (const BlowUpError&) {
        s *= 0.5;
      }
    }
    if (!accepted) {
      if (++consecutive_rejections >= 10) {
        report.termination = Termination::Stalled;
        break;
      }
      continue;
    }
    consecutive_rejections = 0;

    prev_theta = std::move(theta);
    prev_grad = std::move(grad);
    theta = std::move(trial);
    grad = std::move(trial_grad);
    objective = trial_objective;
    grad_norm = param_norm(grad);
    have_history = true;
    report.iterations.push_back({k, objective, grad_norm, s, halvings});
  }
  if (report.termination == Termination::MaxIters && grad_norm <= cfg.grad_tol)
    report.termination = Termination::GradTol;

  report.final_params = theta;
  report.final_objective = ensemble_objective(system, theta, cfg);
  report.final_grad_norm = grad_norm;
  return report;
}

std::string train_report_to_json(const TrainReport& report) {
  nlohmann::json j;
  j["termination"] = to_string(report.termination);
  j["final_objective"] = report.final_objective;
  j["final_grad_norm"] = report.final_grad_norm;
  j["iterations"] = nlohmann::json::array();
  for (const auto& rec : report.iterations) {
    j["iterations"].push_back({{"iter", rec.iter},
                               {"objective", rec.objective},
                               {"grad_norm", rec.grad_norm},
                               {"stepsize", rec.stepsize},
                               {"blowup_halvings", rec.blowup_halvings}});
  }
  return j.dump(2);
}

}  // namespace fbsyn
