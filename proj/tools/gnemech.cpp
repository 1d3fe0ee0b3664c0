// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gnemech/cli.hpp"

namespace {

void add_common(CLI::App* sub, gnemech::RunConfig& c, std::string& variant) {
  sub->add_option("--variant", variant, "standard or extended")
      ->check(CLI::IsMember({"standard", "extended"}));
  sub->add_option("--tol", c.tolerance, "solver and dynamics tolerance")->capture_default_str();
  sub->add_option("--grid-step", c.grid_step, "grid oracle step")->capture_default_str();
  sub->add_option("--max-sweeps", c.max_sweeps, "dynamics sweep cap")->capture_default_str();
  sub->add_option("--damping", c.damping, "dynamics damping in (0,1]")->capture_default_str();
  sub->add_option("--seed", c.seed, "seed")->capture_default_str();
  sub->add_option("--samples", c.samples, "Pareto samples")->capture_default_str();
  sub->add_option("--out", c.output, "output CSV path (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and property checker for the trust-filtering mechanism"};
  app.require_subcommand(1);
  gnemech::RunConfig config;
  std::string variant;

  struct Entry {
    const char* name;
    const char* help;
  };
  const Entry entries[] = {
      {"centralized", "solve the planner problem"},
      {"gne-construct", "build an equilibrium from the planner optimum and check it"},
      {"gne-dynamics", "run best-response dynamics from the zero profile and check the result"},
      {"verify", "check an equilibrium profile read from a file"},
      {"sweep", "gne-construct over seeded random scenarios"},
  };
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, config, variant);
    const std::string name = e.name;
    if (name == "sweep") {
      sub->add_option("--count", config.count, "number of scenarios")->capture_default_str();
    } else {
      sub->add_option("--scenario", config.scenario, "builtin name or scenario JSON path")
          ->required();
    }
    if (name == "verify") {
      sub->add_option("--profile", config.profile, "message profile JSON path")->required();
    }
    sub->callback([&config, name] { config.command = gnemech::parse_command(name); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << nlohmann::json{{"error", "UsageError"}, {"message", e.what()}}.dump() << '\n';
    return gnemech::kExitError;
  }
  if (!variant.empty()) config.variant = gnemech::parse_variant(variant);
  return gnemech::run(config, std::cout, std::cerr);
}
