#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "framesolve/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Adaptive wavelet-frame solver experiments"};
  app.require_subcommand(1);

  std::string config_path;
  struct Command {
    const char* name;
    const char* help;
    framesolve::Mode mode;
  };
  const Command commands[] = {
      {"run", "solve at the target tolerance, then sweep; writes history.csv, sweep.csv, report.txt",
       framesolve::Mode::run},
      {"sweep", "solve for every sweep tolerance; writes sweep.csv and report.txt",
       framesolve::Mode::sweep},
      {"spectrum", "spectral and certification constants only; writes report.txt",
       framesolve::Mode::spectrum},
      {"decompose", "decompose random test functions; writes decomposition.csv and report.txt",
       framesolve::Mode::decompose},
  };
  for (const Command& c : commands) {
    app.add_subcommand(c.name, c.help)
        ->add_option("config", config_path, "experiment configuration file")
        ->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  framesolve::ExperimentConfig config;
  try {
    config = framesolve::load_config(config_path);
  } catch (const framesolve::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  for (const Command& c : commands) {
    if (app.got_subcommand(c.name)) return framesolve::run_experiment(config, c.mode, std::cerr);
  }
  return 1;
}
