#ifndef FBSYN_ERRORS_HPP
#define FBSYN_ERRORS_HPP

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace fbsyn {

/// Drift or feedback evaluation produced a non-finite value.
class NumericalOverflowError : public std::runtime_error {
 public:
  NumericalOverflowError(const std::string& what, Eigen::VectorXd state)
      : std::runtime_error(what), state_(std::move(state)) {}
  const Eigen::VectorXd& state() const { return state_; }

 private:
  Eigen::VectorXd state_;
};

/// Newton iteration for an implicit step failed to converge.
class NewtonFailureError : public std::runtime_error {
 public:
  NewtonFailureError(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// A linear system arising inside a solver was singular.
class LinearSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The algebraic Riccati equation could not be solved for the given data.
class RiccatiError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A closed-loop trajectory escaped the blow-up threshold.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, int ic_index) : std::runtime_error(what), ic_index_(ic_index) {}
  int ic_index() const { return ic_index_; }

 private:
  int ic_index_;
};

/// Training cannot start: the closed loop already blows up at the initial parameters.
class UnrecoverableStartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fbsyn

#endif
