#ifndef FBSYN_EVAL_HPP
#define FBSYN_EVAL_HPP

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fbsyn/feedback.hpp"
#include "fbsyn/systems.hpp"
#include "fbsyn/timestepping.hpp"

namespace fbsyn {

enum class EvalStatus { Ok, NoDecay, BlowUp };

std::string to_string(EvalStatus s);

/// One row of a controller comparison table. On blow-up the norms are
/// reported as +infinity.
struct EvalRow {
  std::string ic_name;
  std::string controller;
  double qy_l2 = 0.0;  // ||Q y||_{L^2(0,T_val)}
  double u_l2 = 0.0;   // ||F(y)||_{L^2(0,T_val)}
  double J = 0.0;      // (1/2)(qy_l2^2 + beta u_l2^2)
  EvalStatus status = EvalStatus::Ok;
};

struct EvalOptions {
  double decay_tol = 1e-2;  // |y(T)|_inf above this marks "does not decay"
  IntegratorOptions integrator;
  int n_threads = 0;
};

/// Integrates the closed loop over [0, T_val] and reports trapezoid L2 norms
/// of Qy and F(y) together with the decay/blow-up classification.
EvalRow validate(const DynamicalSystem& system, const FeedbackLaw& law, const Eigen::VectorXd& y0,
                 double beta, double T_val, int n_steps, const EvalOptions& opts = {});

struct NamedIc {
  std::string name;
  Eigen::VectorXd y0;
};

/// One EvalRow per (initial condition, law), in the given order. Failures in
/// one cell do not abort the others.
std::vector<EvalRow> comparison_table(const DynamicalSystem& system,
                                      const std::vector<std::shared_ptr<const FeedbackLaw>>& laws,
                                      const std::vector<NamedIc>& ics, double beta, double T_val,
                                      int n_steps, const EvalOptions& opts = {});

/// CSV with header ic,controller,qy_l2,u_l2,J,status.
std::string table_to_csv(const std::vector<EvalRow>& rows);

/// Aligned text rendering for standard output.
std::string table_to_text(const std::vector<EvalRow>& rows);

}  // namespace fbsyn

#endif
