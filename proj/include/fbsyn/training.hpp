#ifndef FBSYN_TRAINING_HPP
#define FBSYN_TRAINING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fbsyn/network.hpp"
#include "fbsyn/systems.hpp"
#include "fbsyn/timestepping.hpp"

namespace fbsyn {

/// Configuration of the discrete ensemble learning problem and its optimizer.
struct EnsembleConfig {
  std::vector<Eigen::VectorXd> initial_conditions;
  Eigen::VectorXd weights;     // convex combination, sums to 1
  double beta = 0.1;           // control cost (>= 0)
  double T = 1.0;              // training horizon
  int n_steps = 200;
  double alpha_R = 0.0;        // Frobenius penalty on W_2..W_L
  double eta1 = 1e6;           // row-sum bound on W_1
  double eta2 = 1e6;           // entrywise bound on biases
  int max_iters = 100;
  double grad_tol = 1e-6;
  double s0 = 1e-3;            // first stepsize (no secant history yet)
  double s_min = 1e-8;
  double s_max = 1e2;
  bool bb_paper_orientation = true;  // false: reciprocal (classical) BB formulas
  std::uint64_t seed = 0;
  IntegratorOptions integrator;
  int n_threads = 0;           // 0: hardware concurrency

  void validate(int state_dim) const;
};

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double stepsize = 0.0;
  int blowup_halvings = 0;  // stepsize halvings forced by trial blow-ups
};

enum class Termination { GradTol, MaxIters, Stalled };

std::string to_string(Termination t);

struct TrainReport {
  std::vector<IterationRecord> iterations;
  NetworkParams final_params;
  Termination termination = Termination::MaxIters;
  double final_objective = 0.0;
  double final_grad_norm = 0.0;
};

/// Ensemble cost  (1/2) sum_i w_i int (|Q y_i|^2 + beta |F(y_i)|^2) dt + G_R(theta)
/// with trapezoid-in-time quadrature on the Crank-Nicolson trajectory.
/// Returns +infinity when any trajectory blows up; Newton failures throw.
double ensemble_objective(const DynamicalSystem& system, const NetworkParams& theta,
                          const EnsembleConfig& cfg);

/// Exact gradient of the discrete ensemble objective via the discrete adjoint
/// of the Crank-Nicolson scheme. Also returns the objective value.
/// Throws BlowUpError (carrying the offending initial-condition index) when a
/// trajectory escapes.
std::pair<NetworkParams, double> ensemble_gradient(const DynamicalSystem& system,
                                                   const NetworkParams& theta,
                                                   const EnsembleConfig& cfg);

/// Barzilai-Borwein stepsize from secant data S = theta^k - theta^{k-1},
/// E = grad^k - grad^{k-1}; variant 1 uses (S,E)/(S,S), variant 2 (E,E)/(S,E)
/// (swapped when paper_orientation is false), clamped to [s_min, s_max].
/// Non-finite or non-positive raw values fall back to s_min.
double bb_stepsize(const NetworkParams& S, const NetworkParams& E, int variant, double s_min,
                   double s_max, bool paper_orientation = true);

/// Projected gradient descent with alternating Barzilai-Borwein stepsizes and
/// blow-up guarded step halving.
TrainReport train(const DynamicalSystem& system, const NetworkParams& theta0,
                  const EnsembleConfig& cfg);

std::string train_report_to_json(const TrainReport& report);

}  // namespace fbsyn

#endif
