// dfsq: simulate decoherence-free Ramsey spectroscopy on two ions and extract
// the D5/2 quadrupole moment from parity data.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dfsq/config.hpp"
#include "dfsq/pipeline.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool plot = false;
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("-c,--config", flags.config_path, "Run configuration file")->required();
  cmd->add_option("--seed", flags.seed, "Override the configured seed");
  cmd->add_option("-o,--out", flags.out_dir, "Override the output directory");
  cmd->add_flag("--emit-plot-data", flags.plot, "Also write x/y/sigma plot data files");
  cmd->add_option("-j,--threads", flags.threads, "Worker threads (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoherence-free Ramsey spectroscopy and quadrupole-moment extraction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DFSQ_VERSION);

  CommonFlags flags;
  struct Command {
    const char* name;
    const char* help;
    dfsq::RunMode mode;
  };
  const Command commands[] = {
      {"parity-scan", "Simulate and fit psi1/psi2 parity oscillations at one operating point",
       dfsq::RunMode::parity_scan},
      {"angle-scan", "Scan the magnetic field direction and fit the angular dependence",
       dfsq::RunMode::angle_scan},
      {"gradient-scan", "Scan the field gradient, fit the slope and extract the moment",
       dfsq::RunMode::gradient_scan},
      {"extract", "Convert a measured slope (or a scan table) into the quadrupole moment",
       dfsq::RunMode::extract},
      {"fit-only", "Fit externally supplied parity datasets and/or a scan table",
       dfsq::RunMode::fit_only},
  };
  for (const auto& c : commands) add_common(app.add_subcommand(c.name, c.help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dfsq::kExitConfigError;
  }

  dfsq::RunMode mode = dfsq::RunMode::parity_scan;
  for (const auto& c : commands)
    if (app.got_subcommand(c.name)) mode = c.mode;

  try {
    auto config = dfsq::load_run_config(flags.config_path);
    auto* sub = app.get_subcommands().front();
    if (sub->count("--seed") > 0) config.override_seed(flags.seed);
    if (!flags.out_dir.empty()) config.override_output_dir(flags.out_dir);
    dfsq::RunOptions options;
    options.threads = flags.threads;
    options.emit_plot_data = flags.plot;
    const int code = dfsq::execute(mode, config, options);
    if (code == dfsq::kExitFitFailure)
      std::cerr << "dfsq: one or more fits failed; see " << config.output_dir.string() << "\n";
    return code;
  } catch (const dfsq::ConfigError& e) {
    std::cerr << "dfsq: config error: " << e.what() << "\n";
    return dfsq::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "dfsq: " << e.what() << "\n";
    return 1;
  }
}
