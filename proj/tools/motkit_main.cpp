// Command-line front end: detect / track / simulate / compare.
//
// Exit codes: 0 success, 2 input/output failure, 3 configuration error,
// 4 tracker initialization found no objects, 1 anything else.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "motkit/config.hpp"
#include "motkit/workflows.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::string input;
  std::string out;
  std::string init_locations;
  std::string sigma_levels;
  std::uint64_t seed = 0;
  int block_size = 0;
  double alpha = 0.0;
  int trials = 0;
  bool dump_motion_field = false;

  bool has_seed = false;
  bool has_block_size = false;
  bool has_alpha = false;
  bool has_trials = false;
};

void add_common_options(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_path, "ini-style configuration file");
  cmd->add_option("--out", o.out, "output directory")->required();
  cmd->add_option("--seed", o.seed, "base random seed")
      ->each([&o](const std::string&) { o.has_seed = true; });
  cmd->add_option("--block-size", o.block_size, "matching block size, px")
      ->each([&o](const std::string&) { o.has_block_size = true; });
  cmd->add_option("--alpha", o.alpha, "sigma-point spread parameter")
      ->each([&o](const std::string&) { o.has_alpha = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"block-matching multi-object tracker toolkit"};
  app.require_subcommand(1);

  CliOverrides o;
  CLI::App* detect = app.add_subcommand("detect", "detect moving objects");
  CLI::App* track = app.add_subcommand("track", "track objects over frames");
  CLI::App* simulate =
      app.add_subcommand("simulate", "export one synthetic trial per level");
  CLI::App* compare =
      app.add_subcommand("compare", "run the filter comparison study");

  for (CLI::App* cmd : {detect, track, simulate, compare}) {
    add_common_options(cmd, o);
  }
  for (CLI::App* cmd : {detect, track}) {
    cmd->add_option("--input", o.input, "directory of .pgm frames")
        ->required();
  }
  detect->add_flag("--dump-motion-field", o.dump_motion_field,
                   "also write per-block motion vectors");
  track->add_option("--init-locations", o.init_locations,
                    "seed positions file (one 'x y' per line)");
  for (CLI::App* cmd : {simulate, compare}) {
    cmd->add_option("--sigma-levels", o.sigma_levels,
                    "comma-separated noise levels");
    cmd->add_option("--trials", o.trials, "Monte-Carlo trials per level")
        ->each([&o](const std::string&) { o.has_trials = true; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;  // bad usage is a configuration error
  }

  try {
    motkit::RunConfig cfg;
    if (!o.config_path.empty()) {
      motkit::load_config_file(cfg, o.config_path);
    }
    if (!o.input.empty()) cfg.input_dir = o.input;
    cfg.out_dir = o.out;
    if (!o.init_locations.empty()) cfg.init_locations = o.init_locations;
    if (o.has_seed) cfg.seed = o.seed;
    if (o.has_block_size) cfg.detector.block_size = o.block_size;
    if (o.has_alpha) cfg.ut.alpha = o.alpha;
    if (o.has_trials) cfg.scenario.trials = o.trials;
    if (!o.sigma_levels.empty()) {
      cfg.scenario.sigma_levels =
          motkit::detail::parse_double_list("sigma_levels", o.sigma_levels);
    }
    if (o.dump_motion_field) cfg.dump_motion_field = true;

    motkit::validate_config(cfg);

    if (detect->parsed()) {
      cfg.workflow = "detect";
      motkit::run_detect(cfg);
    } else if (track->parsed()) {
      cfg.workflow = "track";
      motkit::run_track(cfg);
    } else if (simulate->parsed()) {
      cfg.workflow = "simulate";
      motkit::run_simulate(cfg);
    } else {
      cfg.workflow = "compare";
      motkit::run_compare(cfg);
    }
    return 0;
  } catch (const motkit::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 3;
  } catch (const motkit::EmptyDetectionsError& e) {
    std::cerr << "initialization error: " << e.what() << "\n";
    return 4;
  } catch (const motkit::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
