#ifndef FBSYN_CONFIG_HPP
#define FBSYN_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "fbsyn/eval.hpp"
#include "fbsyn/network.hpp"
#include "fbsyn/systems.hpp"
#include "fbsyn/training.hpp"

namespace fbsyn {

/// Declarative description of a set of initial conditions: either explicit
/// (optionally named) vectors, a seeded uniform sample from a box, or one of
/// the named presets built into a benchmark system.
struct IcSpec {
  std::string type;  // "explicit" | "sample_box" | "preset"
  // explicit:
  std::vector<NamedIc> values;
  // sample_box:
  int count = 0;
  double lo = 0.0, hi = 0.0;
  std::uint64_t seed = 0;
  // preset:
  std::vector<std::string> names;
};

struct SystemConfig {
  std::string name;  // lc_circuit | vanderpol | burgers
  int N = 14;
  double nu = 0.2;
  double delta = 2.0;
  int p = 1;
  std::pair<double, double> omega{-0.5, -0.2};
};

struct TrainingConfig {
  Architecture architecture;
  double init_scale = 1e-2;
  std::uint64_t init_seed = 1;
  std::vector<IcSpec> initial_conditions;
  double T = 1.0;
  std::optional<int> n_steps;  // default: 200 per unit time
  double beta = 0.1;
  double alpha_R = 0.0;
  double eta1 = 1e6, eta2 = 1e6;
  int max_iters = 100;
  double grad_tol = 1e-6;
  double s0 = 1e-3, s_min = 1e-8, s_max = 1e2;
  bool bb_paper_orientation = true;
};

struct EvaluationConfig {
  double T_val = 50.0;
  std::optional<int> n_steps;
  // Control penalty used for the comparison tables (LQR/PSE synthesis and the
  // reported costs J). Defaults to the training penalty; setting it lets a
  // controller trained with a smaller beta be scored at the nominal one.
  std::optional<double> beta;
  double decay_tol = 1e-2;
  std::vector<IcSpec> ics;
  bool include_uncontrolled = true;
  bool include_lqr = true;
  bool include_pse = true;
  bool include_nn = true;
};

struct ExperimentConfig {
  SystemConfig system;
  TrainingConfig training;
  EvaluationConfig evaluation;
  std::string output_dir = "out";

  void validate() const;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
std::string experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::string& path);

/// Materializes an IcSpec list for the given system; preset names resolve to
/// the benchmark's published validation profiles.
std::vector<NamedIc> resolve_ics(const std::vector<IcSpec>& specs, const DynamicalSystem& system,
                                 const SystemConfig& sys_cfg);

/// Benchmark initial profiles for the Burgers system evaluated at the interior
/// Chebyshev nodes: Y1 = cos(2 pi x) cos(pi x) + 0.5, Y2 = same + 1.5,
/// Y3 = -2 sign(x), Y4 = 2.5 (x-1)^2 (x+1)^2.
Eigen::VectorXd burgers_preset_ic(const std::string& name, int N);

/// Bundled experiment configurations: "lc_circuit", "vanderpol",
/// "burgers_linreac" (delta=2, p=1), "burgers_cubreac" (delta=0.5, p=3).
ExperimentConfig default_config(const std::string& name);

/// Writes every bundled configuration as <dir>/<name>.json.
void ship_default_configs(const std::string& dir);

/// Builds the EnsembleConfig (resolved initial conditions, weights, defaults)
/// from the experiment description.
EnsembleConfig build_ensemble_config(const ExperimentConfig& cfg, const DynamicalSystem& system);

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> checkpoint;
};

/// Orchestrates one subcommand ("train", "evaluate", "compare") and writes
/// the artifacts under the configured output directory.
void run_experiment(const std::string& mode, const ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace fbsyn

#endif
