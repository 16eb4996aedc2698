#include "fbsyn/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "fbsyn/errors.hpp"
#include "fbsyn/rng.hpp"

namespace fbsyn {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Softplus: return "softplus";
    case Activation::ReluP: return "relu_p";
    case Activation::Tanh: return "tanh";
  }
  return "softplus";
}

Activation activation_from_string(const std::string& s) {
  if (s == "softplus") return Activation::Softplus;
  if (s == "relu_p") return Activation::ReluP;
  if (s == "tanh") return Activation::Tanh;
  throw std::invalid_argument("unknown activation: " + s);
}

double activate(Activation a, double x) {
  switch (a) {
    case Activation::Softplus:
      return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    case Activation::ReluP:
      // x^{1.01} is only real for x >= 0; the max() clips the rest.
      return x > 0 ? std::pow(x, 1.01) : 0.0;
    case Activation::Tanh:
      return std::tanh(x);
  }
  return 0.0;
}

double activate_derivative(Activation a, double x) {
  switch (a) {
    case Activation::Softplus:
      return 1.0 / (1.0 + std::exp(-x));
    case Activation::ReluP:
      return x > 0 ? 1.01 * std::pow(x, 0.01) : 0.0;
    case Activation::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
  }
  return 0.0;
}

void Architecture::validate() const {
  if (layers < 1) throw std::invalid_argument("architecture: need at least one layer");
  if (static_cast<int>(widths.size()) != layers + 1)
    throw std::invalid_argument("architecture: widths must have layers+1 entries");
  for (int w : widths)
    if (w < 1) throw std::invalid_argument("architecture: widths must be positive");
  if (skip_connections) {
    for (int i = 1; i < layers; ++i)
      if (widths[i] != widths[0])
        throw std::invalid_argument("architecture: skip connections need hidden widths equal to n");
  }
}

void NetworkParams::validate() const {
  arch.validate();
  if (static_cast<int>(weights.size()) != arch.layers ||
      static_cast<int>(biases.size()) != arch.layers)
    throw std::invalid_argument("network: wrong number of layers");
  for (int i = 0; i < arch.layers; ++i) {
    if (weights[i].rows() != arch.widths[i + 1] || weights[i].cols() != arch.widths[i])
      throw std::invalid_argument("network: weight shape mismatch in layer " + std::to_string(i + 1));
    if (biases[i].size() != arch.widths[i + 1])
      throw std::invalid_argument("network: bias shape mismatch in layer " + std::to_string(i + 1));
  }
}

bool NetworkParams::all_finite() const {
  for (const auto& W : weights)
    if (!W.allFinite()) return false;
  for (const auto& b : biases)
    if (!b.allFinite()) return false;
  return true;
}

NetworkParams NetworkParams::zeros_like() const {
  NetworkParams z;
  z.arch = arch;
  z.weights.reserve(weights.size());
  z.biases.reserve(biases.size());
  for (const auto& W : weights) z.weights.push_back(Eigen::MatrixXd::Zero(W.rows(), W.cols()));
  for (const auto& b : biases) z.biases.push_back(Eigen::VectorXd::Zero(b.size()));
  return z;
}

double param_dot(const NetworkParams& a, const NetworkParams& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.weights.size(); ++i)
    s += a.weights[i].cwiseProduct(b.weights[i]).sum() + a.biases[i].dot(b.biases[i]);
  return s;
}

double param_norm(const NetworkParams& a) { return std::sqrt(param_dot(a, a)); }

NetworkParams param_axpy(double alpha, const NetworkParams& x, const NetworkParams& y) {
  NetworkParams r = y;
  for (std::size_t i = 0; i < r.weights.size(); ++i) {
    r.weights[i] += alpha * x.weights[i];
    r.biases[i] += alpha * x.biases[i];
  }
  return r;
}

void param_add_scaled(NetworkParams& acc, double alpha, const NetworkParams& x) {
  for (std::size_t i = 0; i < acc.weights.size(); ++i) {
    acc.weights[i] += alpha * x.weights[i];
    acc.biases[i] += alpha * x.biases[i];
  }
}

namespace {

struct ForwardTrace {
  std::vector<Eigen::VectorXd> a;  // a[0] = input, a[i] = output of hidden layer i
  std::vector<Eigen::VectorXd> z;  // z[i-1] = pre-activation of hidden layer i
  Eigen::VectorXd out;
};

ForwardTrace forward_trace(const NetworkParams& theta, const Eigen::VectorXd& x) {
  const int L = theta.arch.layers;
  const bool skip = theta.arch.skip_connections;
  ForwardTrace t;
  t.a.resize(L);
  t.z.resize(L - 1);
  t.a[0] = x;
  for (int i = 1; i < L; ++i) {
    t.z[i - 1] = theta.weights[i - 1] * t.a[i - 1] + theta.biases[i - 1];
    Eigen::VectorXd act(t.z[i - 1].size());
    for (Eigen::Index j = 0; j < act.size(); ++j)
      act(j) = activate(theta.arch.activation, t.z[i - 1](j));
    t.a[i] = skip ? Eigen::VectorXd(act + t.a[i - 1]) : act;
  }
  t.out = theta.weights[L - 1] * t.a[L - 1] + theta.biases[L - 1];
  if (!t.out.allFinite())
    throw NumericalOverflowError("network forward pass overflowed", x);
  return t;
}

// Accumulates sign * v^T D_theta net(x) into grad given the stored trace.
void backprop_theta(const NetworkParams& theta, const ForwardTrace& t, const Eigen::VectorXd& v,
                    double sign, NetworkParams& grad) {
  const int L = theta.arch.layers;
  const bool skip = theta.arch.skip_connections;
  grad.weights[L - 1] += sign * v * t.a[L - 1].transpose();
  grad.biases[L - 1] += sign * v;
  Eigen::VectorXd abar = theta.weights[L - 1].transpose() * v;
  for (int i = L - 1; i >= 1; --i) {
    Eigen::VectorXd zbar(t.z[i - 1].size());
    for (Eigen::Index j = 0; j < zbar.size(); ++j)
      zbar(j) = activate_derivative(theta.arch.activation, t.z[i - 1](j)) * abar(j);
    grad.weights[i - 1] += sign * zbar * t.a[i - 1].transpose();
    grad.biases[i - 1] += sign * zbar;
    if (i > 1) {
      Eigen::VectorXd next = theta.weights[i - 1].transpose() * zbar;
      if (skip) next += abar;
      abar = next;
    }
  }
}

}  // namespace

Eigen::VectorXd nn_forward(const NetworkParams& theta, const Eigen::VectorXd& x) {
  const Eigen::VectorXd shift =
      forward_trace(theta, Eigen::VectorXd::Zero(theta.arch.widths[0])).out;
  return forward_trace(theta, x).out - shift;
}

Eigen::MatrixXd nn_jac_x(const NetworkParams& theta, const Eigen::VectorXd& x) {
  const int L = theta.arch.layers;
  const bool skip = theta.arch.skip_connections;
  const ForwardTrace t = forward_trace(theta, x);
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(theta.arch.widths[0], theta.arch.widths[0]);
  for (int i = 1; i < L; ++i) {
    Eigen::MatrixXd layer = theta.weights[i - 1];
    for (Eigen::Index r = 0; r < layer.rows(); ++r)
      layer.row(r) *= activate_derivative(theta.arch.activation, t.z[i - 1](r));
    if (skip) layer += Eigen::MatrixXd::Identity(layer.rows(), layer.cols());
    J = layer * J;
  }
  return theta.weights[L - 1] * J;
}

NetworkParams nn_vjp_theta(const NetworkParams& theta, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& v) {
  NetworkParams grad = theta.zeros_like();
  nn_vjp_theta_accumulate(theta, x, v, +1.0, grad);
  nn_vjp_theta_accumulate(theta, Eigen::VectorXd::Zero(theta.arch.widths[0]), v, -1.0, grad);
  return grad;
}

void nn_vjp_theta_accumulate(const NetworkParams& theta, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& v, double sign, NetworkParams& grad) {
  const ForwardTrace t = forward_trace(theta, x);
  backprop_theta(theta, t, v, sign, grad);
}

namespace {

// Euclidean projection of a vector onto the l1-ball of radius r (Duchi et al.).
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double r) {
  if (v.lpNorm<1>() <= r) return v;
  std::vector<double> u(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) u[i] = std::abs(v(i));
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double candidate = (cum - r) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0) tau = candidate;
  }
  Eigen::VectorXd w(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::max(std::abs(v(i)) - tau, 0.0);
    w(i) = v(i) >= 0 ? mag : -mag;
  }
  return w;
}

}  // namespace

NetworkParams project_admissible(const NetworkParams& theta, double eta1, double eta2) {
  NetworkParams out = theta;
  // ||W_1||_inf <= eta1 decomposes into an l1 constraint per row.
  for (Eigen::Index r = 0; r < out.weights[0].rows(); ++r) {
    if (out.weights[0].row(r).lpNorm<1>() > eta1)
      out.weights[0].row(r) = project_l1_ball(out.weights[0].row(r).transpose(), eta1).transpose();
  }
  for (auto& b : out.biases)
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      if (b(i) > eta2) b(i) = eta2;
      if (b(i) < -eta2) b(i) = -eta2;
    }
  return out;
}

NetworkParams nn_init(const Architecture& arch, std::uint64_t seed, double scale) {
  arch.validate();
  if (scale < 0) throw std::invalid_argument("nn_init: scale must be >= 0");
  Rng rng(seed);
  NetworkParams theta;
  theta.arch = arch;
  for (int i = 0; i < arch.layers; ++i) {
    Eigen::MatrixXd W(arch.widths[i + 1], arch.widths[i]);
    for (Eigen::Index r = 0; r < W.rows(); ++r)
      for (Eigen::Index c = 0; c < W.cols(); ++c) W(r, c) = rng.uniform(-scale, scale);
    Eigen::VectorXd b(arch.widths[i + 1]);
    for (Eigen::Index r = 0; r < b.size(); ++r) b(r) = rng.uniform(-scale, scale);
    theta.weights.push_back(std::move(W));
    theta.biases.push_back(std::move(b));
  }
  return theta;
}

std::string checkpoint_to_json(const NetworkParams& theta) {
  nlohmann::json j;
  j["layers"] = theta.arch.layers;
  j["widths"] = theta.arch.widths;
  j["activation"] = to_string(theta.arch.activation);
  j["skip_connections"] = theta.arch.skip_connections;
  j["weights"] = nlohmann::json::array();
  j["biases"] = nlohmann::json::array();
  for (const auto& W : theta.weights) {
    std::vector<double> flat(W.size());
    for (Eigen::Index r = 0; r < W.rows(); ++r)
      for (Eigen::Index c = 0; c < W.cols(); ++c) flat[r * W.cols() + c] = W(r, c);
    j["weights"].push_back(flat);
  }
  for (const auto& b : theta.biases)
    j["biases"].push_back(std::vector<double>(b.data(), b.data() + b.size()));
  return j.dump(2);
}

NetworkParams checkpoint_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("checkpoint parse error: ") + e.what());
  }
  NetworkParams theta;
  theta.arch.layers = j.at("layers").get<int>();
  theta.arch.widths = j.at("widths").get<std::vector<int>>();
  theta.arch.activation = activation_from_string(j.at("activation").get<std::string>());
  theta.arch.skip_connections = j.at("skip_connections").get<bool>();
  theta.arch.validate();
  for (int i = 0; i < theta.arch.layers; ++i) {
    const auto flat = j.at("weights").at(i).get<std::vector<double>>();
    const int rows = theta.arch.widths[i + 1], cols = theta.arch.widths[i];
    Eigen::MatrixXd W(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) W(r, c) = flat.at(r * cols + c);
    const auto bflat = j.at("biases").at(i).get<std::vector<double>>();
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(bflat.data(), bflat.size());
    theta.weights.push_back(std::move(W));
    theta.biases.push_back(std::move(b));
  }
  theta.validate();
  return theta;
}

void save_checkpoint(const NetworkParams& theta, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out << checkpoint_to_json(theta) << "\n";
}

NetworkParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return checkpoint_from_json(text);
}

}  // namespace fbsyn
