#include <iostream>

#include "CLI11.hpp"
#include "lagstokes/error.hpp"
#include "lagstokes_cli/app.hpp"
#include "lagstokes_cli/config.hpp"

int main(int argc, char** argv) {
  using namespace lagstokes;
  CLI::App app{"Lagrangian compressible Stokes solver on the periodic torus"};
  std::string config_path;
  std::string mode;
  std::string out;
  int workers = 0;
  bool dump_velocity = false;
  bool dump_flow = false;
  long long seed = -1;
  app.add_option("--config", config_path, "key = value run configuration");
  app.add_option("--mode", mode, "lagrangian, eulerian, uniqueness, pressure-check, bmo or full");
  app.add_option("--out", out, "output directory");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--dump-velocity", dump_velocity, "write velocity snapshots");
  app.add_flag("--dump-flow", dump_flow, "write flow map snapshots");
  app.add_option("--seed", seed, "seed for the random initial density")->check(CLI::NonNegativeNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    std::map<std::string, std::string> entries;
    if (!config_path.empty()) entries = cli::read_config_file(config_path);
    cli::FlagOverrides flags;
    if (!mode.empty()) flags.values["mode"] = mode;
    if (!out.empty()) flags.values["out"] = out;
    if (workers > 0) flags.values["workers"] = std::to_string(workers);
    if (dump_velocity) flags.values["dump_velocity"] = "true";
    if (dump_flow) flags.values["dump_flow"] = "true";
    if (seed >= 0) flags.values["seed"] = std::to_string(seed);
    const cli::RunConfig cfg = cli::resolve_config(entries, flags);
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
    return cli::run(cfg, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return cli::exit_status_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kConfigOrIo;
  }
}
