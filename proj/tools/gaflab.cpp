#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gaflab/config.hpp"
#include "gaflab/csv.hpp"
#include "gaflab/error.hpp"
#include "gaflab/experiments.hpp"
#include "gaflab/version.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> sets;
  int jobs = 1;
  bool quiet = false;
  bool print_config = false;
};

const char* describe(gaflab::ExperimentKind k) {
  using gaflab::ExperimentKind;
  switch (k) {
    case ExperimentKind::validate: return "Check the GAF conditions and solve for the amplification threshold";
    case ExperimentKind::race: return "Iterations to a target loss, baseline vs transformed optimizer";
    case ExperimentKind::saddle: return "Displacement after a fixed number of steps from near a saddle";
    case ExperimentKind::curvature: return "Secant-based Lipschitz / strong convexity / condition number estimates";
    case ExperimentKind::surface: return "Equivalent loss surface of a transformed gradient field";
    case ExperimentKind::bound: return "Optimality gap against the SGD convergence bound";
    case ExperimentKind::train: return "Toy MLP training, baseline vs transformed SGDM over seeds";
    case ExperimentKind::suggest: return "Record gradient maxima, classify the loss curve, suggest alpha/beta";
  }
  return "";
}

int run(gaflab::ExperimentKind kind, const Flags& f) {
  std::string text;
  if (!f.config.empty()) {
    try {
      text = gaflab::read_file(f.config);
    } catch (const gaflab::IoError& e) {
      std::cerr << "i/o error: " << e.what() << "\n";
      return gaflab::kExitIo;
    }
  }
  std::vector<std::string> overrides = f.sets;
  if (!f.seeds.empty()) {
    std::string list = "seeds=[";
    for (std::size_t i = 0; i < f.seeds.size(); ++i) {
      list += (i ? "," : "") + std::to_string(f.seeds[i]);
    }
    overrides.push_back(list + "]");
  }
  gaflab::ExperimentConfig cfg;
  try {
    cfg = gaflab::parse_config(text, kind, overrides);
  } catch (const gaflab::ConfigError& e) {
    std::cerr << "config error";
    if (!f.config.empty()) std::cerr << " in " << f.config;
    std::cerr << ":\n";
    for (const std::string& issue : e.issues()) std::cerr << "  " << issue << "\n";
    return gaflab::kExitConfig;
  }
  if (f.print_config) {
    std::cout << gaflab::config_json(cfg);
    return gaflab::kExitPass;
  }
  gaflab::RunOptions opts;
  if (!f.out.empty()) opts.out = f.out;
  opts.jobs = f.jobs;
  opts.quiet = f.quiet;
  return gaflab::run_experiment(cfg, opts, f.quiet ? std::cerr : std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaflab: gradient activation function experiments"};
  app.set_version_flag("--version", std::string(gaflab::kVersion));
  app.require_subcommand(1);

  Flags flags;
  std::optional<gaflab::ExperimentKind> chosen;
  for (gaflab::ExperimentKind k : gaflab::all_experiment_kinds()) {
    CLI::App* sub = app.add_subcommand(std::string(gaflab::to_string(k)), describe(k));
    sub->add_option("--config", flags.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "Output root (default: config, then $GAFLAB_OUT, then ./gaflab_out)");
    sub->add_option("--seed", flags.seeds, "Seed(s); replaces the config's seed list");
    sub->add_option("--set", flags.sets, "Override a config field: section.key=value (JSON value)");
    sub->add_option("--jobs", flags.jobs, "Threads used across seeds")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", flags.quiet, "Only print failures");
    sub->add_flag("--print-config", flags.print_config, "Print the resolved config and exit");
    sub->callback([&chosen, k] { chosen = k; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gaflab::kExitConfig;
  }
  return run(*chosen, flags);
}
