#include <doctest.h>

#include <cmath>

#include "fbsyn/config.hpp"
#include "fbsyn/spectral.hpp"

using namespace fbsyn;

TEST_CASE("bundled configs") {
  // LC: single affine layer trained from the first canonical basis vector
  const ExperimentConfig lc = default_config("lc_circuit");
  CHECK(lc.system.name == "lc_circuit");
  CHECK(lc.training.architecture.layers == 1);
  CHECK(lc.training.beta == 0.1);
  REQUIRE(lc.training.initial_conditions.size() == 1);
  REQUIRE(lc.training.initial_conditions[0].type == "explicit");
  const Eigen::VectorXd& e1 = lc.training.initial_conditions[0].values[0].y0;
  CHECK((e1 - Eigen::Vector3d(1, 0, 0)).norm() == 0.0);

  // VdP: L=3, widths all 2, relu_p, skip on, T=3, beta=0.001, 10 sampled ICs
  const ExperimentConfig vdp = default_config("vanderpol");
  CHECK(vdp.training.architecture.layers == 3);
  CHECK(vdp.training.architecture.widths.front() == 2);
  CHECK(vdp.training.architecture.activation == Activation::ReluP);
  CHECK(vdp.training.architecture.skip_connections);
  CHECK(vdp.training.T == 3.0);
  CHECK(vdp.training.beta == 0.001);
  CHECK(vdp.training.initial_conditions[0].type == "sample_box");
  CHECK(vdp.training.initial_conditions[0].count == 10);
  CHECK(vdp.training.initial_conditions[0].lo == -10.0);
  CHECK(vdp.training.initial_conditions[0].hi == 10.0);

  // Burgers: L=4, widths all 13, softplus, 40 sampled ICs, uniform weights
  const ExperimentConfig bl = default_config("burgers_linreac");
  CHECK(bl.system.delta == 2.0);
  CHECK(bl.system.p == 1);
  CHECK(bl.training.architecture.layers == 4);
  CHECK(bl.training.architecture.widths == std::vector<int>{13, 13, 13, 13, 1});
  CHECK(bl.training.architecture.activation == Activation::Softplus);
  CHECK(bl.training.initial_conditions[0].count == 40);

  const DynamicalSystem bsys = make_system("burgers");
  const EnsembleConfig ens = build_ensemble_config(bl, bsys);
  CHECK(ens.initial_conditions.size() == 40);
  CHECK(ens.weights.size() == 40);
  CHECK(ens.weights.minCoeff() == doctest::Approx(1.0 / 40).epsilon(1e-14));
  CHECK(ens.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));

  const ExperimentConfig bc = default_config("burgers_cubreac");
  CHECK(bc.system.delta == 0.5);
  CHECK(bc.system.p == 3);
  REQUIRE(bc.evaluation.beta.has_value());
  CHECK(*bc.evaluation.beta == 0.1);

  CHECK_THROWS_AS(default_config("pendulum"), std::invalid_argument);
}

TEST_CASE("json round-trip is semantically identical") {
  for (const std::string name :
       {"lc_circuit", "vanderpol", "burgers_linreac", "burgers_cubreac"}) {
    const ExperimentConfig a = default_config(name);
    const ExperimentConfig b = parse_experiment_config(experiment_config_to_json(a));
    CHECK(b.system.name == a.system.name);
    CHECK(b.system.N == a.system.N);
    CHECK(b.system.delta == a.system.delta);
    CHECK(b.system.p == a.system.p);
    CHECK(b.training.architecture.layers == a.training.architecture.layers);
    CHECK(b.training.architecture.widths == a.training.architecture.widths);
    CHECK(b.training.architecture.activation == a.training.architecture.activation);
    CHECK(b.training.beta == a.training.beta);
    CHECK(b.training.T == a.training.T);
    CHECK(b.training.max_iters == a.training.max_iters);
    CHECK(b.training.bb_paper_orientation == a.training.bb_paper_orientation);
    CHECK(b.training.initial_conditions.size() == a.training.initial_conditions.size());
    for (std::size_t i = 0; i < a.training.initial_conditions.size(); ++i) {
      const IcSpec& sa = a.training.initial_conditions[i];
      const IcSpec& sb = b.training.initial_conditions[i];
      CHECK(sb.type == sa.type);
      CHECK(sb.count == sa.count);
      CHECK(sb.seed == sa.seed);
      REQUIRE(sb.values.size() == sa.values.size());
      for (std::size_t k = 0; k < sa.values.size(); ++k) {
        CHECK(sb.values[k].name == sa.values[k].name);
        CHECK((sb.values[k].y0 - sa.values[k].y0).norm() == 0.0);  // 17-digit round-trip
      }
    }
    CHECK(b.evaluation.T_val == a.evaluation.T_val);
    CHECK(b.evaluation.beta == a.evaluation.beta);
    CHECK(b.evaluation.n_steps == a.evaluation.n_steps);
    CHECK(b.output_dir == a.output_dir);
  }
}

TEST_CASE("config validation errors") {
  CHECK_THROWS_AS(parse_experiment_config("{not json"), std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_config("{}"), std::invalid_argument);

  ExperimentConfig bad = default_config("lc_circuit");
  bad.system.name = "pendulum";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  ExperimentConfig mis = default_config("lc_circuit");
  mis.training.architecture.widths.front() = 2;  // state dimension is 3
  CHECK_THROWS_AS(mis.validate(), std::invalid_argument);

  ExperimentConfig neg = default_config("lc_circuit");
  neg.evaluation.T_val = -1.0;
  CHECK_THROWS_AS(neg.validate(), std::invalid_argument);

  ExperimentConfig nb = default_config("lc_circuit");
  nb.evaluation.beta = -0.1;
  CHECK_THROWS_AS(nb.validate(), std::invalid_argument);

  CHECK_THROWS_AS(load_experiment_config("/nonexistent/path.json"), std::invalid_argument);
}

TEST_CASE("burgers preset profiles") {
  const Eigen::VectorXd x = chebyshev_nodes(14).segment(1, 13);

  const Eigen::VectorXd y1 = burgers_preset_ic("Y1", 14);
  const Eigen::VectorXd y2 = burgers_preset_ic("Y2", 14);
  const Eigen::VectorXd y3 = burgers_preset_ic("Y3", 14);
  const Eigen::VectorXd y4 = burgers_preset_ic("Y4", 14);
  REQUIRE(y1.size() == 13);
  for (int i = 0; i < 13; ++i) {
    const double xi = x(i);
    CHECK(y1(i) == doctest::Approx(std::cos(2 * M_PI * xi) * std::cos(M_PI * xi) + 0.5)
                       .epsilon(1e-14));
    CHECK(y2(i) == doctest::Approx(y1(i) + 1.0).epsilon(1e-13));
    CHECK(y3(i) == doctest::Approx(xi > 0 ? -2.0 : (xi < 0 ? 2.0 : 0.0)).epsilon(1e-14));
    CHECK(y4(i) ==
          doctest::Approx(2.5 * std::pow(xi - 1, 2) * std::pow(xi + 1, 2)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(burgers_preset_ic("Y9", 14), std::invalid_argument);
}

TEST_CASE("resolve_ics sampling is deterministic") {
  const DynamicalSystem vdp = make_system("vanderpol");
  SystemConfig sc;
  sc.name = "vanderpol";
  IcSpec box;
  box.type = "sample_box";
  box.count = 5;
  box.lo = -10;
  box.hi = 10;
  box.seed = 202;
  const auto a = resolve_ics({box}, vdp, sc);
  const auto b = resolve_ics({box}, vdp, sc);
  REQUIRE(a.size() == 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK((a[i].y0 - b[i].y0).norm() == 0.0);
    CHECK(a[i].y0.cwiseAbs().maxCoeff() <= 10.0);
    CHECK(a[i].y0.size() == 2);
  }
  box.seed = 203;
  const auto c = resolve_ics({box}, vdp, sc);
  CHECK((a[0].y0 - c[0].y0).norm() > 0.0);
}
