#pragma once

// Command-line front end: flags, an optional key=value config file whose
// values the flags override, and the exit-status contract.

#include "torusbesov/harness.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace torusbesov {

struct ParsedCommandLine {
  std::optional<ExperimentConfig> config;
  /// Exit status when parsing ended the run (help or a usage error).
  int exit_code = 0;
};

inline ParsedCommandLine parse_command_line(int argc, const char* const* argv, std::ostream& out = std::cout,
                                            std::ostream& err = std::cerr) {
  ExperimentConfig cfg;
  std::string equation = "ch", field = "datum", out_dir = cfg.out.string();
  std::uint64_t memory_mib = 0;

  CLI::App app{"Norm inflation experiments for the Camassa-Holm and Novikov equations on the torus",
               "torusbesov"};
  app.add_option("command", cfg.subcommand, "lemmas | inflate | properties | flowcheck")
      ->required()
      ->check(CLI::IsMember({"lemmas", "inflate", "properties", "flowcheck"}));
  app.add_option("--n", cfg.n_list, "Comma-separated construction parameters (multiples of 8)")
      ->delimiter(',');
  app.add_option("--equation", equation, "ch | novikov")->check(CLI::IsMember({"ch", "novikov"}));
  app.add_option("--T", cfg.T, "Final time (default 1/log n)");
  app.add_option("--dt", cfg.dt, "Fixed time step (default from the CFL rule)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", cfg.seed, "Seed for the property suites");
  app.add_option("--record-stride", cfg.record_stride, "Steps between records (default about 100 records)");
  app.add_option("--field", field, "flowcheck velocity: datum | zero | constant")
      ->check(CLI::IsMember({"datum", "zero", "constant"}));
  app.add_option("--constant", cfg.constant, "flowcheck constant field value");
  app.add_option("--memory-budget", memory_mib, "MiB available to lemma rows (default MemAvailable)");
  app.set_config("--config", "", "key=value file mirroring the flags; flags take precedence");
  app.allow_config_extras(false);

  ParsedCommandLine result;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    result.exit_code = app.exit(e, out, err);
    return result;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    result.exit_code = static_cast<int>(ExitCode::config_error);
    return result;
  }
  cfg.equation = equation == "ch" ? Equation::ch : Equation::novikov;
  static const std::map<std::string, FlowField> fields{
      {"datum", FlowField::datum}, {"zero", FlowField::zero}, {"constant", FlowField::constant}};
  cfg.field = fields.at(field);
  cfg.out = out_dir;
  cfg.memory_budget = memory_mib << 20;
  result.config = cfg;
  return result;
}

inline int run_command_line(int argc, const char* const* argv) {
  const ParsedCommandLine parsed = parse_command_line(argc, argv);
  if (!parsed.config)
    return parsed.exit_code;
  return run_experiment(*parsed.config);
}

} // namespace torusbesov
