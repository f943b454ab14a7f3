// ifsq: command-line front end for the library.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ifsq/harness.hpp"

int main(int argc, char** argv) {
  namespace h = ifsq::harness;
  CLI::App app{"Iterated function systems, fractal transformations and quantization of measures"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out = ".";
  std::size_t threads = 1;
  bool strict = false;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "seed for stochastic operations");
  app.add_option("--out", out, "output directory for artifacts");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 1024));
  app.add_flag("--strict", strict, "exit nonzero when a report verdict fails");

  // Lets the global options follow the subcommand name.
  app.fallthrough();
  for (const auto& name : h::subcommands()) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : h::kValidation;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  h::json config;
  try {
    if (!config_path.empty()) {
      config = h::load_config(config_path);
    } else if (name == "verify") {
      config = {{"schema_version", h::kSchemaVersion}};
    } else {
      std::cerr << "error: --config is required for " << name << '\n';
      return h::kValidation;
    }
  } catch (const ifsq::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return h::kValidation;
  }

  h::RunOptions options;
  if (seed_opt->count() > 0) options.seed = seed;
  options.out = out;
  options.threads = threads;
  options.strict = strict;
  return h::run_subcommand(name, config, options, std::cout, std::cerr);
}
