// Command-line front end: one subcommand per experiment kind.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kflow/error.hpp"
#include "kflow/harness.hpp"

namespace {

struct Args {
  std::string config;
  std::string out;
  int parallel = 1;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Args& a) {
  sub->add_option("--config", a.config, "experiment config (JSON)")->required();
  sub->add_option("--out", a.out, "output directory (default: config output_dir)");
  sub->add_option("--parallel", a.parallel, "worker threads for sweeps and tables")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", a.seed, "override the random initial-condition seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kflow: Kolmogorov and shear flow numerical laboratory"};
  app.set_version_flag("--version", kflow::version());
  app.require_subcommand(1);
  Args args;
  const char* kinds[][2] = {
      {"simulate", "evolve one model and record probes"},
      {"sweep", "enhanced-damping ratios over model.nu_list"},
      {"stability", "index-formula table over stability.alphas"},
      {"rage", "time-averaged PN energy of a linearized Euler run"},
      {"damping", "one enhanced-damping ratio at model.nu"},
  };
  for (const auto& k : kinds) add_common(app.add_subcommand(k[0], k[1]), args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    kflow::ExperimentConfig cfg = kflow::load_config(args.config);
    kflow::RunOptions opts;
    opts.subcommand = sub;
    if (!args.out.empty()) opts.out = args.out;
    opts.parallel = args.parallel;
    opts.seed = args.seed;
    kflow::run_experiment(std::move(cfg), opts, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "kflow " << sub << ": " << e.what() << "\n";
    return kflow::exit_code_for(e);
  }
  return 0;
}
