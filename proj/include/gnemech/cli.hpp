// Copyright 2026 The gnemech Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "gnemech/model.hpp"

namespace gnemech {

enum class Command { kCentralized, kGneConstruct, kGneDynamics, kVerify, kSweep };
std::string to_string(Command c);
Command parse_command(const std::string& s);

struct RunConfig {
  Command command = Command::kCentralized;
  std::string scenario;  // builtin name or file path; unused by sweep
  std::optional<Variant> variant;
  double tolerance = 1e-8;
  double grid_step = 0.01;
  int max_sweeps = 500;
  double damping = 0.5;
  std::uint64_t seed = 0;
  int samples = 10000;
  std::string output;   // empty: write to `out`
  std::string profile;  // verify only
  int count = 100;      // sweep only
};

/// Throws ParameterError on an out-of-range field.
void validate_config(const RunConfig& config);

/// Exit codes: 0 when every executed check passes, 1 when a check fails,
/// 2 on an error. Errors are written to `err` as one JSON record.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitError = 2;

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace gnemech
