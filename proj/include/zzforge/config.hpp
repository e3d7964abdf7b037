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

// Run configuration: JSON with unit-suffixed quantities. Frequencies are
// held in cyclic Hz and times in seconds; model builders convert to rad/s.

#include <cstdint>
#include <optional>
#include <string>

#include "zzforge/dynamics.hpp"

namespace zzforge {

struct QubitBare {
  double omega01_hz = 0.0;
  double anharmonicity_hz = 0.0;

  bool operator==(const QubitBare&) const = default;
};

struct BareSection {
  QubitBare q1;
  QubitBare q2;
  double g1_hz = 0.0;
  // Resonator-mediated topology only.
  double cavity_hz = 0.0;
  double h1_hz = 0.0;
  double h2_hz = 0.0;
  int photon_cutoff = 3;

  bool operator==(const BareSection&) const = default;
};

/// Resolved dressed transitions, cyclic Hz.
struct TransitionSection {
  double t00_10 = 0.0;
  double t00_01 = 0.0;
  double t01_11 = 0.0;
  double t10_11 = 0.0;
  double t10_20 = 0.0;
  double t01_02 = 0.0;

  bool operator==(const TransitionSection&) const = default;
};

struct DeviceSection {
  Topology topology = Topology::DirectCapacitive;
  int levels = 3;
  double guard_factor = 3.0;
  /// Exactly one of these is present.
  std::optional<TransitionSection> transitions;
  std::optional<BareSection> bare;
  bool calibrate = true;  ///< fit bare parameters to `transitions`

  bool operator==(const DeviceSection&) const = default;
};

struct CoherenceSection {
  bool enabled = true;
  std::array<double, 2> t1_s{};
  std::array<double, 2> t2star_s{};

  bool operator==(const CoherenceSection&) const = default;
};

struct SimulationSection {
  ModelKind model = ModelKind::Logical4;
  double max_dt_s = 1e-11;
  bool rwa = true;
  bool check_convergence = true;
  double tolerance = 1e-6;
  double tag_period_s = 0.05e-9;
  int swipht_samples = 4096;

  bool operator==(const SimulationSection&) const = default;
};

struct ExperimentSection {
  std::optional<std::uint64_t> seed;
  long shots = 1000;
  int rb_pi2_sequences = 5;
  int rb_pi_sequences = 8;
  int rb_max_pairs = 60;
  int rb_stride = 2;
  bool perfect_prep = false;

  bool operator==(const ExperimentSection&) const = default;
};

struct RunConfig {
  DeviceSection device;
  CoherenceSection coherence;
  SimulationSection simulation;
  ExperimentSection experiment;
  std::string output_dir = "out";

  bool operator==(const RunConfig&) const = default;
};

/// Reads and validates a config file. ParseError carries the line or key;
/// ValidationError lists every violated constraint.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text,
                            const std::string& source = "<string>");

/// Canonical JSON text; parse_config_text(emit_config(c)) == c.
std::string emit_config(const RunConfig& c);

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const RunConfig& c);

/// Collects every violated constraint; throws ValidationError if any.
void validate(const RunConfig& c);

/// Parses "5.07 GHz", "53.8 ns" and friends into Hz or seconds.
double parse_quantity(const std::string& text, const std::string& key,
                      bool frequency);
std::string format_hz(double hz);
std::string format_seconds(double s);

/// Device model derived from the config.
struct DerivedDevice {
  SimulationModel model;
  std::optional<CalibrationResult> calibration;
  TransitionTable spectrum;
};

DerivedDevice derive_device(const RunConfig& c);

std::optional<DecoherenceSpec> decoherence_of(const RunConfig& c);
SimulationOptions simulation_options(const RunConfig& c);

}  // namespace zzforge
