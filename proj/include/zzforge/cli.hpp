// Copyright 2026 The zzforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

// Batch front end: config + command in, JSON/CSV artifacts out.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zzforge/config.hpp"

namespace zzforge {

/// Command-line overrides on top of a RunConfig.
struct CliOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<long> shots;
  std::optional<bool> decoherence;
  std::optional<ModelKind> model;
  std::optional<bool> perfect_prep;
  std::string gate = "cnot";  ///< qpt: cnot | cz
  double theta = 1.5707963267948966;
  char axis = 'x';
  int qubit = 1;      ///< 1 or 2
  int spectator = 0;  ///< pulse-tag: spectator state
  std::optional<std::string> transition;  ///< rb, pulse-tag
};

const std::vector<std::string>& cli_commands();

/// Applies overrides, runs one workflow, writes artifacts. Returns the exit
/// code: 0 success, 1 invalid input, 2 a numerical routine did not converge.
int dispatch(const std::string& command, RunConfig cfg, const CliOptions& opt,
             std::ostream& out, std::ostream& err);

/// Full command line entry point.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

/// "pi/2", "-pi", "3*pi/4" or a plain number.
double parse_angle(const std::string& s);

/// Writes to a sibling temporary then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& text);

/// Locale-independent shortest round-trip decimal.
std::string format_number(double x);

}  // namespace zzforge
