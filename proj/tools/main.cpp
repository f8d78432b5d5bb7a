#include <CLI11.hpp>

#include <iostream>

#include "crossdiff/cli.hpp"

int main(int argc, char** argv) {
  crossdiff::CliOptions opts;
  CLI::App app{"Cross-diffusion competition models: kinetics, Turing thresholds and simulation"};
  app.require_subcommand(1);

  std::string config;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", config, "JSON run configuration");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "output root; runs land in <out>/<config hash>")
        ->capture_default_str();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_flag("--quiet", opts.quiet, "print nothing on success");
  };

  for (const char* name : {"analyze", "threshold", "dispersion", "simulate"}) {
    add_common(app.add_subcommand(name), true);
  }
  auto* sweep = app.add_subcommand("sweep", "epsilon sweep (fast vs limit) or d12 sweep");
  add_common(sweep, true);
  sweep->add_option("--epsilons", opts.epsilons, "strictly decreasing epsilon list")
      ->delimiter(',');
  sweep->add_option("--d12", opts.d12, "d12 values")->delimiter(',');

  auto* classify = app.add_subcommand("classify", "sign-structure classification");
  add_common(classify, false);
  classify->add_option("--signs", opts.signs, "J11,J12,J21,J22 as +/-")->required();
  classify->add_option("--d2-sign", opts.d2_sign, "sign of dD/dv: +, - or 0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return crossdiff::kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  opts.command = sub->get_name();
  if (!config.empty()) opts.config = config;
  if (sub->count("--seed") > 0) opts.seed = seed;
  return crossdiff::run_command(opts, std::cout, std::cerr).exit_code;
}
