#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "fbsyn/errors.hpp"
#include "fbsyn/rng.hpp"
#include "fbsyn/spectral.hpp"
#include "fbsyn/systems.hpp"

using namespace fbsyn;

namespace {

Eigen::VectorXd random_state(Rng& rng, int n, double lo, double hi) {
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = rng.uniform(lo, hi);
  return y;
}

// Central finite differences of the drift, column by column.
Eigen::MatrixXd fd_jacobian(const DynamicalSystem& sys, const Eigen::VectorXd& y, double h) {
  Eigen::MatrixXd J(sys.n, sys.n);
  for (int j = 0; j < sys.n; ++j) {
    Eigen::VectorXd yp = y, ym = y;
    yp(j) += h;
    ym(j) -= h;
    J.col(j) = (sys.eval_f(yp) - sys.eval_f(ym)) / (2 * h);
  }
  return J;
}

}  // namespace

TEST_CASE("lc circuit structure") {
  const DynamicalSystem lc = make_lc_circuit();
  CHECK(lc.n == 3);
  CHECK(lc.m == 1);

  Eigen::MatrixXd A_expect(3, 3);
  A_expect << 0, 1, -1, -1, 0, 0, 1, 0, 0;
  const auto [A, B] = lc.linearization();
  CHECK((A - A_expect).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(B.rows() == 3);
  CHECK(B.cols() == 1);
  CHECK(B(0, 0) == 0.0);
  CHECK(B(1, 0) == 1.0);
  CHECK(B(2, 0) == 0.0);
  CHECK((lc.output_matrix - Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);

  // f(1,0,0) = first column of A
  const Eigen::VectorXd f = lc.eval_f(Eigen::Vector3d(1, 0, 0));
  CHECK(f(0) == doctest::Approx(0.0));
  CHECK(f(1) == doctest::Approx(-1.0));
  CHECK(f(2) == doctest::Approx(1.0));

  // skew-symmetric drift: (f(y), y) = 0
  Rng rng(7);
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd y = random_state(rng, 3, -5, 5);
    CHECK(std::abs(lc.eval_f(y).dot(y)) < 1e-14 * (1 + y.squaredNorm()));
  }
}

TEST_CASE("vanderpol structure") {
  const DynamicalSystem vdp = make_vanderpol();
  CHECK(vdp.n == 2);
  CHECK(vdp.m == 1);

  CHECK(vdp.eval_f(Eigen::Vector2d(0, 0)).norm() == 0.0);
  const Eigen::VectorXd f = vdp.eval_f(Eigen::Vector2d(1, 0));
  CHECK(f(0) == doctest::Approx(0.0));
  CHECK(f(1) == doctest::Approx(-1.2));

  Eigen::MatrixXd A_expect(2, 2);
  A_expect << 0, 1, -2, 1.5;
  CHECK((vdp.eval_jacobian(Eigen::Vector2d::Zero()) - A_expect).lpNorm<Eigen::Infinity>() <
        1e-14);

  // Q = e1 e1^T
  Eigen::MatrixXd Q_expect(2, 2);
  Q_expect << 1, 0, 0, 0;
  CHECK((vdp.output_matrix - Q_expect).norm() == 0.0);
}

TEST_CASE("burgers structure") {
  const DynamicalSystem b = make_burgers(14, 0.2, 0.5, 3, {-0.5, -0.2});
  CHECK(b.n == 13);
  CHECK(b.m == 1);

  // control indicator: exactly the interior nodes in (-0.5,-0.2), i.e. global
  // nodes j=8,9 -> interior indices 7,8
  for (int i = 0; i < 13; ++i) {
    const double expect = (i == 7 || i == 8) ? 1.0 : 0.0;
    CHECK(b.control_matrix(i, 0) == expect);
  }

  // Q = diag(sqrt(interior cc weights))
  const Eigen::VectorXd w = clenshaw_curtis_weights(14);
  for (int i = 0; i < 13; ++i) {
    CHECK(b.output_matrix(i, i) == doctest::Approx(std::sqrt(w(i + 1))).epsilon(1e-14));
  }

  CHECK(b.eval_f(Eigen::VectorXd::Zero(13)).norm() == 0.0);

  // cubic term has zero Jacobian at 0: A equals the linreac A minus 2I
  const auto [A_cub, B_cub] = b.linearization();
  const DynamicalSystem blin = make_burgers(14, 0.2, 2.0, 1, {-0.5, -0.2});
  const auto [A_lin, B_lin] = blin.linearization();
  CHECK((A_lin - A_cub - 2.0 * Eigen::MatrixXd::Identity(13, 13)).lpNorm<Eigen::Infinity>() <
        1e-12);
  CHECK((B_lin - B_cub).norm() == 0.0);

  // D_xx is the square of the first-derivative matrix restricted to the
  // interior block; with delta*y^3 the linearization is exactly nu*D_xx.
  const Eigen::MatrixXd D = chebyshev_diff_matrix(14);
  const Eigen::MatrixXd Dxx_int = (D * D).block(1, 1, 13, 13);
  CHECK((A_cub - 0.2 * Dxx_int).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("burgers drift matches analytic derivatives of sin(pi x)") {
  // delta = 0: drift = nu*D_xx*y + y .* (D_x*y); sin(pi x) vanishes at the
  // boundary so the interior restriction is exact.
  const double nu = 0.2;
  const DynamicalSystem b = make_burgers(14, nu, 0.0, 1, {-0.5, -0.2});
  const Eigen::VectorXd x = chebyshev_nodes(14).segment(1, 13);
  const Eigen::VectorXd y = (M_PI * x.array()).sin();
  const Eigen::VectorXd expect =
      nu * (-M_PI * M_PI) * (M_PI * x.array()).sin() +
      (M_PI * x.array()).sin() * M_PI * (M_PI * x.array()).cos();
  CHECK((b.eval_f(y) - expect).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("drift jacobians match finite differences") {
  const std::vector<DynamicalSystem> systems = {
      make_lc_circuit(), make_vanderpol(), make_burgers(14, 0.2, 2.0, 1, {-0.5, -0.2}),
      make_burgers(14, 0.2, 0.5, 3, {-0.5, -0.2})};
  Rng rng(11);
  for (const auto& sys : systems) {
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXd y = random_state(rng, sys.n, -2, 2);
      const Eigen::MatrixXd J = sys.eval_jacobian(y);
      const Eigen::MatrixXd Jfd = fd_jacobian(sys, y, 1e-5);
      CHECK((J - Jfd).norm() <= 1e-5 * std::max(1.0, J.norm()));
    }
  }
}

TEST_CASE("benchmark invariants") {
  for (const std::string name : {"lc_circuit", "vanderpol", "burgers"}) {
    const DynamicalSystem sys = make_system(name);
    // f(0) = 0 exactly
    CHECK(sys.eval_f(Eigen::VectorXd::Zero(sys.n)).norm() == 0.0);
    // nonlinear part vanishes at 0 and agrees with f - Df(0) y
    CHECK(sys.nonlinear_part(Eigen::VectorXd::Zero(sys.n)).norm() == 0.0);
    const auto [A, B] = sys.linearization();
    Rng rng(3);
    const Eigen::VectorXd y = random_state(rng, sys.n, -1, 1);
    CHECK((sys.nonlinear_part(y) - (sys.eval_f(y) - A * y)).lpNorm<Eigen::Infinity>() < 1e-12);
    // Q symmetric PSD
    const Eigen::MatrixXd& Q = sys.output_matrix;
    CHECK((Q - Q.transpose()).norm() < 1e-14);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("eval_f rejects non-finite results") {
  const DynamicalSystem b = make_burgers(14, 0.2, 0.5, 3, {-0.5, -0.2});
  const Eigen::VectorXd huge = Eigen::VectorXd::Constant(13, 1e200);
  CHECK_THROWS_AS(b.eval_f(huge), NumericalOverflowError);
}

TEST_CASE("make_system dispatch") {
  CHECK(make_system("lc_circuit").n == 3);
  CHECK(make_system("vanderpol").n == 2);
  CHECK(make_system("burgers", 14).n == 13);
  CHECK_THROWS_AS(make_system("pendulum"), std::invalid_argument);
}
