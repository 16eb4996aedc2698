#ifndef FBSYN_NETWORK_HPP
#define FBSYN_NETWORK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fbsyn {

enum class Activation { Softplus, ReluP, Tanh };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

double activate(Activation a, double x);
double activate_derivative(Activation a, double x);

/// Layer layout of a feedback network. widths = (N0=n, N1, ..., NL=m).
/// With skip connections every hidden width must equal n so that the
/// identity shortcut typechecks.
struct Architecture {
  int layers = 1;            // L >= 1
  std::vector<int> widths;   // L+1 entries
  Activation activation = Activation::Softplus;
  bool skip_connections = false;

  void validate() const;  // throws std::invalid_argument on inconsistency
};

/// Weights and biases (W_i, b_i), i = 1..L, together with the owning
/// architecture. Also serves as the gradient-shaped value: gradients carry
/// the same per-layer layout and support the inner-product algebra below.
struct NetworkParams {
  Architecture arch;
  std::vector<Eigen::MatrixXd> weights;  // W_i: N_i x N_{i-1}
  std::vector<Eigen::VectorXd> biases;   // b_i: N_i

  void validate() const;
  bool all_finite() const;
  /// Same-shaped all-zero value (for gradient accumulation).
  NetworkParams zeros_like() const;
};

// Parameter-space algebra, inner products over every weight and bias entry.
double param_dot(const NetworkParams& a, const NetworkParams& b);
double param_norm(const NetworkParams& a);
NetworkParams param_axpy(double alpha, const NetworkParams& x, const NetworkParams& y);  // alpha*x + y
void param_add_scaled(NetworkParams& acc, double alpha, const NetworkParams& x);

/// Shifted realization F(x) = net(x) - net(0); F(0) = 0 exactly.
Eigen::VectorXd nn_forward(const NetworkParams& theta, const Eigen::VectorXd& x);

/// Jacobian of nn_forward with respect to the input.
Eigen::MatrixXd nn_jac_x(const NetworkParams& theta, const Eigen::VectorXd& x);

/// v^T D_theta F(x), reshaped per layer. Backpropagates through both the
/// x-evaluation and the shift at 0.
NetworkParams nn_vjp_theta(const NetworkParams& theta, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& v);

/// Accumulates sign * v^T D_theta net(x) (the unshifted composition) into
/// grad. The shift is obtained by a second call at x = 0 with opposite sign;
/// batched accumulation exploits linearity in v.
void nn_vjp_theta_accumulate(const NetworkParams& theta, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& v, double sign, NetworkParams& grad);

/// Euclidean projection onto {||W_1||_inf <= eta1, |b_i|_inf <= eta2}:
/// every row of W_1 is projected onto the l1-ball of radius eta1, biases are
/// clamped entrywise, remaining weights pass through unchanged.
NetworkParams project_admissible(const NetworkParams& theta, double eta1, double eta2);

/// Deterministic uniform initialization in [-scale, scale].
NetworkParams nn_init(const Architecture& arch, std::uint64_t seed, double scale);

// JSON checkpoint round-trip (architecture header + row-major layer arrays).
std::string checkpoint_to_json(const NetworkParams& theta);
NetworkParams checkpoint_from_json(const std::string& text);
void save_checkpoint(const NetworkParams& theta, const std::string& path);
NetworkParams load_checkpoint(const std::string& path);

}  // namespace fbsyn

#endif
