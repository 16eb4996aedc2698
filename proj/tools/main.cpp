#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fbsyn/config.hpp"
#include "fbsyn/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalFailure = 3;
constexpr int kExitBlowUpAtStart = 4;

int run(const std::string& mode, const std::string& config_path, const fbsyn::RunOptions& opts) {
  fbsyn::ExperimentConfig cfg;
  try {
    cfg = fbsyn::load_experiment_config(config_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  try {
    fbsyn::run_experiment(mode, cfg, opts);
  } catch (const fbsyn::UnrecoverableStartError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBlowUpAtStart;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalFailure;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fbsyn: feedback controller synthesis for nonlinear systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir, checkpoint;
  std::optional<std::uint64_t> seed;
  std::string mode;

  for (const std::string name : {"train", "evaluate", "compare"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("config", config_path, "experiment configuration (JSON)")->required();
    sub->add_option("--out-dir", out_dir, "override the output directory");
    sub->add_option("--seed", seed, "override the initialization seed");
    sub->add_option("--checkpoint", checkpoint, "network checkpoint path");
    sub->callback([&mode, name] { mode = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfigError;
  }

  fbsyn::RunOptions opts;
  opts.out_dir = out_dir;
  opts.seed = seed;
  opts.checkpoint = checkpoint;
  return run(mode, config_path, opts);
}
