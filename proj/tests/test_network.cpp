#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "fbsyn/network.hpp"
#include "fbsyn/rng.hpp"

using namespace fbsyn;

namespace {

// Random parameters with preactivations kept away from the relu_p kink.
NetworkParams random_params(const Architecture& arch, std::uint64_t seed, double scale) {
  return nn_init(arch, seed, scale);
}

Eigen::VectorXd random_vector(Rng& rng, int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-12, std::abs(want));
}

}  // namespace

TEST_CASE("activations") {
  CHECK(activate(Activation::Softplus, 1.0) ==
        doctest::Approx(std::log1p(std::exp(1.0))).epsilon(1e-14));
  CHECK(activate(Activation::Softplus, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(activate(Activation::Tanh, 0.5) == doctest::Approx(std::tanh(0.5)).epsilon(1e-14));

  // relu_p: x^1.01 on the active branch, zero otherwise; derivative vanishes
  // and stays continuous across 0.
  CHECK(activate(Activation::ReluP, 2.0) == doctest::Approx(std::pow(2.0, 1.01)).epsilon(1e-14));
  CHECK(activate(Activation::ReluP, -1.0) == 0.0);
  CHECK(activate_derivative(Activation::ReluP, 0.0) == 0.0);
  CHECK(activate_derivative(Activation::ReluP, -1e-9) == 0.0);
  CHECK(activate_derivative(Activation::ReluP, 1e-9) < 1.01);
  CHECK(activate_derivative(Activation::ReluP, 1e-300) < 1e-2);

  CHECK(activation_from_string("softplus") == Activation::Softplus);
  CHECK(activation_from_string(to_string(Activation::ReluP)) == Activation::ReluP);
  CHECK_THROWS_AS(activation_from_string("sigmoid"), std::invalid_argument);
}

TEST_CASE("architecture validation") {
  Architecture bad{2, {3, 4, 1}, Activation::Softplus, true};  // skip needs hidden width 3
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  Architecture mismatched{2, {3, 4}, Activation::Softplus, false};  // needs L+1 widths
  CHECK_THROWS_AS(mismatched.validate(), std::invalid_argument);
  Architecture ok{2, {3, 3, 1}, Activation::Softplus, true};
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("nn_forward shift") {
  // any theta: F(0) = 0 exactly
  for (const bool skip : {false, true}) {
    const Architecture arch{3, {4, 4, 4, 2}, Activation::Softplus, skip};
    const NetworkParams theta = random_params(arch, 42, 0.3);
    CHECK(nn_forward(theta, Eigen::VectorXd::Zero(4)).norm() == 0.0);
  }

  // L=1 affine: the shift cancels the bias
  Architecture a1{1, {2, 2}, Activation::Softplus, false};
  NetworkParams t1 = nn_init(a1, 1, 0.0);
  t1.weights[0] << 2, 0, 0, 3;
  t1.biases[0] << 7, -5;
  const Eigen::VectorXd out = nn_forward(t1, Eigen::Vector2d(1, 1));
  CHECK(out(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(out(1) == doctest::Approx(3.0).epsilon(1e-14));

  // L=2 scalar with skip: F(1) = (softplus(1)+1) - softplus(0)
  Architecture a2{2, {1, 1, 1}, Activation::Softplus, true};
  NetworkParams t2 = nn_init(a2, 1, 0.0);
  t2.weights[0] << 1;
  t2.weights[1] << 1;
  const double got = nn_forward(t2, Eigen::VectorXd::Ones(1))(0);
  CHECK(got == doctest::Approx(std::log1p(std::exp(1.0)) + 1.0 - std::log(2.0)).epsilon(1e-12));
  CHECK(got == doctest::Approx(1.620114).epsilon(1e-6));
}

TEST_CASE("nn_jac_x basics") {
  // L=1: Jacobian is W everywhere
  Architecture a1{1, {3, 2}, Activation::Tanh, false};
  NetworkParams t1 = nn_init(a1, 5, 0.4);
  Rng rng(9);
  const Eigen::VectorXd x = random_vector(rng, 3, -1, 1);
  CHECK((nn_jac_x(t1, x) - t1.weights[0]).norm() < 1e-15);

  // relu_p with all preactivations negative and no skip: zero Jacobian
  Architecture ar{2, {2, 2, 1}, Activation::ReluP, false};
  NetworkParams tr = nn_init(ar, 1, 0.0);
  tr.weights[0] << 1, 0, 0, 1;
  tr.biases[0] << -5, -5;
  tr.weights[1] << 1, 1;
  CHECK(nn_jac_x(tr, Eigen::Vector2d(0.5, 0.5)).norm() == 0.0);
}

TEST_CASE("nn derivative finite-difference oracles") {
  // All activations x skip settings x L in {1,2,3,4}; relative error <= 1e-6
  // with h = 1e-5. relu_p inputs are kept away from the kink (its second
  // derivative is unbounded at 0, which would degrade central differences).
  const double h = 1e-5;
  for (const Activation act : {Activation::Softplus, Activation::ReluP, Activation::Tanh}) {
    for (const bool skip : {false, true}) {
      for (int L = 1; L <= 4; ++L) {
        const int n = 3;
        std::vector<int> widths(L + 1, n);
        widths.back() = 2;
        const Architecture arch{L, widths, act, skip};
        NetworkParams theta = nn_init(arch, 1000 + L, 0.2);
        if (act == Activation::ReluP) {
          // positive biases push preactivations into the smooth region
          for (auto& b : theta.biases) b.array() += 1.0;
        }
        Rng rng(17 * L + (skip ? 1 : 0));
        const Eigen::VectorXd x = random_vector(rng, n, 0.2, 0.8);
        const Eigen::VectorXd v = random_vector(rng, 2, -1, 1);
        const Eigen::VectorXd w = random_vector(rng, n, -1, 1);

        // state Jacobian against a directional difference
        const double dir_fd =
            v.dot(nn_forward(theta, x + h * w) - nn_forward(theta, x - h * w)) / (2 * h);
        const double dir_exact = v.dot(nn_jac_x(theta, x) * w);
        CHECK(rel_err(dir_exact, dir_fd) <= 1e-6);

        // parameter VJP against a directional difference in theta
        const NetworkParams dtheta = nn_init(arch, 99 + L, 0.5);
        const NetworkParams g = nn_vjp_theta(theta, x, v);
        const NetworkParams tp = param_axpy(h, dtheta, theta);
        const NetworkParams tm = param_axpy(-h, dtheta, theta);
        const double vjp_fd = v.dot(nn_forward(tp, x) - nn_forward(tm, x)) / (2 * h);
        CHECK(rel_err(param_dot(g, dtheta), vjp_fd) <= 1e-6);
      }
    }
  }
}

TEST_CASE("nn_vjp_theta basics") {
  const Architecture arch{2, {3, 3, 1}, Activation::Softplus, true};
  const NetworkParams theta = nn_init(arch, 2, 0.3);
  Rng rng(5);
  const Eigen::VectorXd x = random_vector(rng, 3, -1, 1);

  // v = 0 -> zero gradient
  CHECK(param_norm(nn_vjp_theta(theta, x, Eigen::VectorXd::Zero(1))) == 0.0);

  // L=1 linear: Wbar = v x^T, bbar = 0 (the bias cancels under the shift)
  Architecture a1{1, {3, 2}, Activation::Softplus, false};
  const NetworkParams t1 = nn_init(a1, 3, 0.3);
  const Eigen::VectorXd v = random_vector(rng, 2, -1, 1);
  const NetworkParams g = nn_vjp_theta(t1, x, v);
  CHECK((g.weights[0] - v * x.transpose()).norm() < 1e-14);
  CHECK(g.biases[0].norm() == 0.0);
}

TEST_CASE("parameter algebra") {
  const Architecture arch{2, {2, 2, 1}, Activation::Tanh, false};
  const NetworkParams a = nn_init(arch, 1, 0.5);
  const NetworkParams b = nn_init(arch, 2, 0.5);
  CHECK(param_dot(a, a) == doctest::Approx(param_norm(a) * param_norm(a)).epsilon(1e-12));
  const NetworkParams c = param_axpy(2.0, a, b);  // 2a + b
  CHECK(param_dot(c, a) == doctest::Approx(2 * param_dot(a, a) + param_dot(b, a)).epsilon(1e-12));
  NetworkParams acc = a.zeros_like();
  CHECK(param_norm(acc) == 0.0);
  param_add_scaled(acc, -1.5, b);
  CHECK(param_norm(acc) == doctest::Approx(1.5 * param_norm(b)).epsilon(1e-12));
}

TEST_CASE("project_admissible") {
  const Architecture arch{2, {2, 2, 1}, Activation::Softplus, true};

  // feasible point is returned unchanged bitwise
  NetworkParams t = nn_init(arch, 4, 1e-3);
  const NetworkParams p = project_admissible(t, 1.0, 1.0);
  CHECK(param_norm(param_axpy(-1.0, t, p)) == 0.0);

  // single-coordinate row: l1 projection clips to the radius
  NetworkParams t2 = nn_init(arch, 4, 0.0);
  t2.weights[0](0, 0) = 3.0;
  const NetworkParams p2 = project_admissible(t2, 1.0, 1.0);
  CHECK(p2.weights[0](0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p2.weights[0](0, 1) == 0.0);

  // bias clamp
  NetworkParams t3 = nn_init(arch, 4, 0.0);
  t3.biases[0](1) = 5.0;
  CHECK(project_admissible(t3, 1.0, 2.0).biases[0](1) == 2.0);

  // W_2..W_L pass through
  NetworkParams t4 = nn_init(arch, 4, 0.0);
  t4.weights[1](0, 0) = 100.0;
  CHECK(project_admissible(t4, 1.0, 1.0).weights[1](0, 0) == 100.0);

  // idempotent and non-expansive on random pairs
  Rng rng(31);
  for (int k = 0; k < 10; ++k) {
    const NetworkParams x = nn_init(arch, 100 + k, 3.0);
    const NetworkParams y = nn_init(arch, 200 + k, 3.0);
    const NetworkParams px = project_admissible(x, 0.7, 0.5);
    const NetworkParams ppx = project_admissible(px, 0.7, 0.5);
    CHECK(param_norm(param_axpy(-1.0, px, ppx)) < 1e-14);
    const NetworkParams py = project_admissible(y, 0.7, 0.5);
    CHECK(param_norm(param_axpy(-1.0, px, py)) <=
          param_norm(param_axpy(-1.0, x, y)) + 1e-14);
    // row-sum and bias bounds hold
    for (int i = 0; i < px.weights[0].rows(); ++i)
      CHECK(px.weights[0].row(i).lpNorm<1>() <= 0.7 + 1e-12);
    for (const auto& b : px.biases) CHECK(b.lpNorm<Eigen::Infinity>() <= 0.5 + 1e-14);
  }
}

TEST_CASE("nn_init determinism") {
  const Architecture arch{3, {2, 2, 2, 1}, Activation::ReluP, true};
  const NetworkParams a = nn_init(arch, 7, 0.01);
  const NetworkParams b = nn_init(arch, 7, 0.01);
  CHECK(param_norm(param_axpy(-1.0, a, b)) == 0.0);
  const NetworkParams c = nn_init(arch, 8, 0.01);
  CHECK(param_norm(param_axpy(-1.0, a, c)) > 0.0);

  // scale 0 -> zero network -> F == 0
  const NetworkParams z = nn_init(arch, 7, 0.0);
  CHECK(param_norm(z) == 0.0);
  CHECK(nn_forward(z, Eigen::Vector2d(1, -2)).norm() == 0.0);

  // all draws within [-scale, scale]
  for (const auto& W : a.weights) CHECK(W.cwiseAbs().maxCoeff() <= 0.01);
}

TEST_CASE("checkpoint round-trip") {
  const Architecture arch{2, {3, 3, 1}, Activation::Softplus, true};
  const NetworkParams theta = nn_init(arch, 12345, 0.37);
  const NetworkParams back = checkpoint_from_json(checkpoint_to_json(theta));
  CHECK(back.arch.layers == 2);
  CHECK(back.arch.widths == theta.arch.widths);
  CHECK(back.arch.activation == theta.arch.activation);
  CHECK(back.arch.skip_connections == theta.arch.skip_connections);
  CHECK(param_norm(param_axpy(-1.0, theta, back)) == 0.0);  // bit-exact

  const std::string path = "checkpoint_roundtrip_test.json";
  save_checkpoint(theta, path);
  const NetworkParams loaded = load_checkpoint(path);
  CHECK(param_norm(param_axpy(-1.0, theta, loaded)) == 0.0);
  std::remove(path.c_str());

  CHECK_THROWS_AS(checkpoint_from_json("{not json"), std::invalid_argument);
}
