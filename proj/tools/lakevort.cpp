#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "lakevort/error.hpp"
#include "lakevort/experiments.hpp"
#include "lakevort/parallel.hpp"

using namespace lakevort;

int main(int argc, char** argv) {
  CLI::App app{"Energy-maximizing vortex pairs in lakes"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 0;
  app.add_option("--config", config_path, "experiment config file");
  app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
  app.add_option("--threads", threads, "worker threads (default LAKEVORT_THREADS or all cores)");

  using Command = int (*)(const ExperimentConfig&, const RunContext&);
  struct Entry {
    const char* name;
    const char* help;
    Command run;
  };
  const Entry entries[] = {
      {"maximize", "bathtub ascent to a steady vortex pair", cmd_maximize},
      {"figure1", "rotating pair radii over a nu sweep", cmd_figure1},
      {"eps-sweep", "concentration of maximizers as eps decreases", cmd_epsilon_sweep},
      {"invariants", "operator and rearrangement invariant suite", cmd_invariants},
      {"green-check", "Green's function expansion check on the disk", cmd_green_check},
  };
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", config_path, "experiment config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    RunContext ctx;
    ctx.out_dir = out_dir.empty() ? cfg.output.dir : out_dir;
    ctx.threads = threads > 0 ? threads : default_threads();
    ctx.log = &std::cout;
    for (const auto& e : entries) {
      if (app.got_subcommand(e.name)) return e.run(cfg, ctx);
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
