#ifndef FBSYN_FEEDBACK_HPP
#define FBSYN_FEEDBACK_HPP

#include <functional>
#include <memory>
#include <string>

#include <Eigen/Core>
#include <Eigen/LU>

#include "fbsyn/network.hpp"

namespace fbsyn {

/// Instantaneous state feedback u = F(y) with F(0) = 0. Implementations are
/// immutable and safe for concurrent use.
class FeedbackLaw {
 public:
  virtual ~FeedbackLaw() = default;
  virtual Eigen::VectorXd eval(const Eigen::VectorXd& y) const = 0;
  /// D_y F(y), m x n; used by the implicit integrator and the adjoint.
  virtual Eigen::MatrixXd state_jacobian(const Eigen::VectorXd& y) const = 0;
  virtual int control_dim() const = 0;
  virtual std::string name() const = 0;
};

class ZeroFeedback final : public FeedbackLaw {
 public:
  ZeroFeedback(int n, int m) : n_(n), m_(m) {}
  Eigen::VectorXd eval(const Eigen::VectorXd&) const override { return Eigen::VectorXd::Zero(m_); }
  Eigen::MatrixXd state_jacobian(const Eigen::VectorXd&) const override {
    return Eigen::MatrixXd::Zero(m_, n_);
  }
  int control_dim() const override { return m_; }
  std::string name() const override { return "uncont."; }

 private:
  int n_, m_;
};

/// u = K y.
class LinearFeedback final : public FeedbackLaw {
 public:
  explicit LinearFeedback(Eigen::MatrixXd K, std::string name = "linear")
      : K_(std::move(K)), name_(std::move(name)) {}
  Eigen::VectorXd eval(const Eigen::VectorXd& y) const override { return K_ * y; }
  Eigen::MatrixXd state_jacobian(const Eigen::VectorXd&) const override { return K_; }
  int control_dim() const override { return static_cast<int>(K_.rows()); }
  std::string name() const override { return name_; }
  const Eigen::MatrixXd& gain() const { return K_; }

 private:
  Eigen::MatrixXd K_;
  std::string name_;
};

/// Riccati gain K = -(1/beta) B^T Pi.
Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& Pi, const Eigen::MatrixXd& B, double beta);

/// u = -(1/beta) B^T Pi y.
Eigen::VectorXd lqr_feedback(const Eigen::MatrixXd& Pi, const Eigen::MatrixXd& B, double beta,
                             const Eigen::VectorXd& y);

std::shared_ptr<LinearFeedback> make_lqr_law(const Eigen::MatrixXd& Pi, const Eigen::MatrixXd& B,
                                             double beta);

/// Power-series-expansion controller
///   F(y) = -(1/beta) B^T ( Pi y - (A^T - (1/beta) Pi B B^T Pi)^{-1} Pi f_l(y) )
/// where f_l(y) = f(y) - Df(0) y. The linear solve is factorized once at
/// construction; a singular system matrix raises LinearSolveError.
class PseFeedback final : public FeedbackLaw {
 public:
  PseFeedback(Eigen::MatrixXd Pi, Eigen::MatrixXd A, Eigen::MatrixXd B, double beta,
              std::function<Eigen::VectorXd(const Eigen::VectorXd&)> nonlinear_part,
              std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> drift_jacobian);
  Eigen::VectorXd eval(const Eigen::VectorXd& y) const override;
  Eigen::MatrixXd state_jacobian(const Eigen::VectorXd& y) const override;
  int control_dim() const override { return static_cast<int>(B_.cols()); }
  std::string name() const override { return "PSE"; }

 private:
  Eigen::MatrixXd Pi_, A_, B_;
  double beta_;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> nonlinear_part_;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> drift_jacobian_;
  Eigen::PartialPivLU<Eigen::MatrixXd> correction_lu_;  // A^T - (1/beta) Pi B B^T Pi
};

/// Shifted neural network realization.
class NetworkFeedback final : public FeedbackLaw {
 public:
  explicit NetworkFeedback(NetworkParams theta) : theta_(std::move(theta)) { theta_.validate(); }
  Eigen::VectorXd eval(const Eigen::VectorXd& y) const override { return nn_forward(theta_, y); }
  Eigen::MatrixXd state_jacobian(const Eigen::VectorXd& y) const override {
    return nn_jac_x(theta_, y);
  }
  int control_dim() const override { return theta_.arch.widths.back(); }
  std::string name() const override { return "NN"; }
  const NetworkParams& params() const { return theta_; }

 private:
  NetworkParams theta_;
};

}  // namespace fbsyn

#endif
