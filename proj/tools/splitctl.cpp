#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "adsplit/commands.hpp"
#include "adsplit/config.hpp"
#include "adsplit/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Adaptive operator-splitting solver for 1D reaction-diffusion problems"};
  std::string command;
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  bool print_defaults = false;
  app.add_option("command", command, "run | study-order | study-dtstar | reference | theory")
      ->check(CLI::IsMember({"run", "study-order", "study-dtstar", "reference", "theory"}));
  app.add_option("--config", config_path, "JSON configuration file (comments allowed)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads for the pointwise reaction solves")
      ->check(CLI::PositiveNumber);
  app.add_flag("--print-defaults", print_defaults,
               "print the effective configuration with all defaults and exit");
  CLI11_PARSE(app, argc, argv);

  try {
    adsplit::RunConfig cfg = config_path.empty() ? adsplit::parse_config_text("")
                                                 : adsplit::parse_config(config_path);
    if (print_defaults) {
      std::cout << adsplit::config_to_json(cfg).dump(2) << "\n";
      return 0;
    }
    if (command.empty()) {
      std::cerr << "splitctl: a subcommand is required\n" << app.help();
      return 2;
    }
    if (config_path.empty()) {
      std::cerr << "splitctl: --config is required\n";
      return 2;
    }
    if (const char* env = std::getenv("SPLITCTL_OUT_DIR"); env && *env) {
      out_dir = env;
    } else if (out_dir.empty()) {
      out_dir = cfg.out_dir;
    }
    if (out_dir.empty()) {
      std::cerr << "splitctl: --out is required\n";
      return 2;
    }
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif
    adsplit::run_subcommand(command, cfg, out_dir, std::cerr);
  } catch (const adsplit::StageError& e) {
    std::cerr << "splitctl: " << command << " failed in stage '" << e.stage() << "': " << e.what()
              << "\n";
    return 1;
  } catch (const adsplit::ConfigError& e) {
    std::cerr << "splitctl: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "splitctl: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
