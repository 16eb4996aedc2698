#include "fbsyn/feedback.hpp"

#include <Eigen/LU>

#include "fbsyn/errors.hpp"

namespace fbsyn {

Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& Pi, const Eigen::MatrixXd& B, double beta) {
  return -(1.0 / beta) * B.transpose() * Pi;
}

Eigen::VectorXd lqr_feedback(const Eigen::MatrixXd& Pi, const Eigen::MatrixXd& B, double beta,
                             const Eigen::VectorXd& y) {
  return -(1.0 / beta) * B.transpose() * (Pi * y);
}

std::shared_ptr<LinearFeedback> make_lqr_law(const Eigen::MatrixXd& Pi, const Eigen::MatrixXd& B,
                                             double beta) {
  return std::make_shared<LinearFeedback>(lqr_gain(Pi, B, beta), "LQR");
}

PseFeedback::PseFeedback(Eigen::MatrixXd Pi, Eigen::MatrixXd A, Eigen::MatrixXd B, double beta,
                         std::function<Eigen::VectorXd(const Eigen::VectorXd&)> nonlinear_part,
                         std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> drift_jacobian)
    : Pi_(std::move(Pi)),
      A_(std::move(A)),
      B_(std::move(B)),
      beta_(beta),
      nonlinear_part_(std::move(nonlinear_part)),
      drift_jacobian_(std::move(drift_jacobian)) {
  const Eigen::MatrixXd E =
      A_.transpose() - (1.0 / beta_) * Pi_ * B_ * B_.transpose() * Pi_;
  Eigen::FullPivLU<Eigen::MatrixXd> check(E);
  if (!check.isInvertible())
    throw LinearSolveError("PSE correction matrix A^T - (1/beta) Pi B B^T Pi is singular (rank " +
                           std::to_string(check.rank()) + " of " + std::to_string(E.rows()) + ")");
  correction_lu_.compute(E);
}

Eigen::VectorXd PseFeedback::eval(const Eigen::VectorXd& y) const {
  const Eigen::VectorXd correction = correction_lu_.solve(Pi_ * nonlinear_part_(y));
  return -(1.0 / beta_) * B_.transpose() * (Pi_ * y - correction);
}

Eigen::MatrixXd PseFeedback::state_jacobian(const Eigen::VectorXd& y) const {
  // D f_l(y) = Df(y) - A.
  const Eigen::MatrixXd Dfl = drift_jacobian_(y) - A_;
  const Eigen::MatrixXd correction = correction_lu_.solve(Pi_ * Dfl);
  return -(1.0 / beta_) * B_.transpose() * (Pi_ - correction);
}

}  // namespace fbsyn
