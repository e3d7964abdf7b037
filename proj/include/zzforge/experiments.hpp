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

// Protocol drivers: randomized benchmarking of the composite single-qubit
// gates, two-qubit state tomography and process tomography, with seeded shot
// sampling.

#include <cstdint>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "zzforge/dynamics.hpp"
#include "zzforge/estimation.hpp"

namespace zzforge {

/// Independent RNG streams derived from one master seed.
class ShotSampler {
 public:
  explicit ShotSampler(std::uint64_t master = 0) : master_(master) {}

  std::uint64_t master() const { return master_; }
  /// splitmix64 of (master, index).
  std::uint64_t stream_seed(std::uint64_t index) const;
  std::mt19937_64 stream(std::uint64_t index) const;

  /// Multinomial draw by sequential binomials.
  static std::vector<long> multinomial(const std::vector<double>& probs,
                                       long shots, std::mt19937_64& rng);

 private:
  std::uint64_t master_;
};

// Experiment setup

struct ExperimentContext {
  SimulationModel model;
  SimulationOptions sim;  ///< decoherence lives here
  double tag_period = 0.05e-9;
  int swipht_samples = 4096;
  /// Ideal instantaneous preparation rotations instead of simulated pulses.
  bool perfect_prep = false;
};

/// A composite-pulse rotation on one qubit. Negative angles use drive phase
/// +pi; y rotations use phase pi/2.
struct TagGate {
  int qubit = 0;
  char axis = 'x';  ///< 'x' or 'y'
  double angle = 0.0;
};

CMatrix ideal_rotation(char axis, double angle);
CMatrix ideal_gate(const TagGate& g);

/// Composite-pulse parameters for `g` with the spectator in
/// `spectator_state`: carrier on that branch, phase from axis and sign.
TagParams tag_design(const EffectiveZZParams& p, const TagGate& g,
                     int spectator_state);

/// Simulates and caches gate processes. Thread safe.
class GateSet {
 public:
  explicit GateSet(ExperimentContext ctx);

  const ExperimentContext& context() const { return ctx_; }

  /// Composite pulse with carrier on the lower (spectator in |0>) or upper
  /// (spectator in |1>) branch; the spectator-block phase is removed with a
  /// frame update on the spectator.
  QuantumProcess tag(const TagGate& g, int spectator_state = 0) const;
  /// Closed-system version of tag() (for reporting).
  CMatrix tag_unitary(const TagGate& g, int spectator_state = 0) const;

  /// Shaped CNOT followed by an idle completing one ZZ period, frame
  /// corrected on the control. `phi` receives the fitted conditional phase.
  QuantumProcess swipht_cnot(double* phi = nullptr) const;
  /// Shaped CNOT only, frame corrected.
  QuantumProcess swipht_pulse(double* phi = nullptr) const;
  QuantumProcess free_cz() const;

 private:
  struct Entry {
    QuantumProcess process;
    CMatrix unitary;
    double phi = 0.0;
  };
  const Entry& cached(const std::string& key,
                      const std::function<Entry()>& make) const;
  Entry make_tag(const TagGate& g, int spectator_state) const;
  Entry make_swipht(bool idle) const;

  ExperimentContext ctx_;
  mutable std::mutex mu_;
  mutable std::map<std::string, Entry> cache_;
};

// Randomized benchmarking

enum class Transition { T00_10, T01_11, T00_01, T10_11 };

std::string to_string(Transition t);
Transition transition_from_string(const std::string& s);
int target_qubit(Transition t);
int spectator_state(Transition t);

/// One element of an RB sequence: rotation about '0' (identity), 'x', 'y' or
/// 'z' (frame update) by `angle`.
struct RbGate {
  char axis = '0';
  double angle = 0.0;
  bool operator==(const RbGate&) const = default;
};

std::string to_string(const RbGate& g);

struct RBSequence {
  /// Alternating pi gate, pi/2 gate; pairs() of each.
  std::vector<RbGate> gates;
  std::vector<int> truncations;  ///< number of pi/2 gates kept
  std::vector<std::vector<RbGate>> recovery;
  std::uint64_t seed = 0;

  int pairs() const { return static_cast<int>(gates.size() / 2); }
};

/// Ideal 2x2 unitary of an RB gate.
CMatrix rb_gate_unitary(const RbGate& g);

/// Ordered candidates for the recovery search.
std::vector<RbGate> recovery_candidates();

/// Shortest (at most 2) candidate composition taking `state` to |0>.
std::vector<RbGate> find_recovery(const CVector& state);

std::vector<RBSequence> generate_rb_sequences(int n_pi2_seqs, int n_pi_seqs,
                                              int max_pairs, int stride,
                                              std::uint64_t seed);

struct RbOptions {
  int n_pi2_seqs = 5;
  int n_pi_seqs = 8;
  int max_pairs = 60;
  int stride = 2;
  long shots = 1000;
};

struct RbResult {
  Transition transition = Transition::T00_10;
  std::vector<DecayPoint> table;
  DecayFit fit;
  std::vector<RBSequence> sequences;
};

RbResult run_rb(Transition t, const GateSet& gates, const RbOptions& opt,
                const ShotSampler& sampler);

// Tomography

struct PrepCircuit {
  std::string label;
  std::vector<TagGate> gates;
  CVector ideal;  ///< ideal prepared ket
};

/// {+z, -z, +x, -x, +y, -y} on each qubit, qubit 1 varying slowest.
std::vector<PrepCircuit> prepare_input_states();

/// Process realizing a preparation circuit from |00> (simulated pulses, or
/// ideal when the context asks for perfect preparation).
QuantumProcess prep_process(const PrepCircuit& c, const GateSet& gates);

struct TomographyDataset {
  std::string kind;  ///< "QST" or "QPT"
  std::vector<std::string> inputs;
  std::vector<std::string> settings;
  /// counts[input][setting][outcome], outcomes 00, 01, 10, 11.
  std::vector<std::vector<std::array<long, 4>>> counts;
  long shots = 0;
  std::uint64_t seed = 0;
  std::string gate;
};

/// Exact outcome probabilities of each setting for a state.
std::vector<std::array<double, 4>> setting_probabilities(
    const CMatrix& rho, const std::vector<TomographySetting>& settings);

/// Applies prep then process to |00>, then each setting, and samples.
/// Cell streams are indexed input * settings + setting.
TomographyDataset run_qst(const QuantumProcess& prep,
                          const QuantumProcess& process,
                          const std::vector<TomographySetting>& settings,
                          const ShotSampler& sampler, long shots,
                          std::uint64_t input_index = 0);

enum class QptGate { SwiphtCnot, FreeCz };

std::string to_string(QptGate g);
QptGate qpt_gate_from_string(const std::string& s);

struct QptRun {
  TomographyDataset dataset;
  QuantumProcess process;  ///< simulated gate process (without preparation)
  CMatrix ideal;           ///< ideal target unitary
  double phi = 0.0;        ///< fitted CNOT phase (SwiphtCnot)
  double duration = 0.0;   ///< gate plus idle
};

QptRun run_qpt(QptGate gate, const GateSet& gates, const ShotSampler& sampler,
               long shots = 1000);

/// Converts a dataset and its preparation list into estimator input with the
/// ideal input states assumed.
std::vector<ProcessObservation> process_observations(
    const TomographyDataset& d, const std::vector<PrepCircuit>& preps,
    const std::vector<TomographySetting>& settings);

std::vector<SettingCounts> state_observations(
    const TomographyDataset& d, const std::vector<TomographySetting>& settings,
    std::size_t input = 0);

}  // namespace zzforge
