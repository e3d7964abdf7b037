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

// Time evolution: midpoint-exponential propagators for closed and open
// systems, quantum processes on the logical space, and pulse simulation in
// the per-qubit rotating frame.

#include <functional>
#include <optional>
#include <vector>

#include "zzforge/device_model.hpp"
#include "zzforge/pulse_design.hpp"
#include "zzforge/qcore.hpp"

namespace zzforge {

using HamiltonianFn = std::function<CMatrix(double)>;

struct StepOptions {
  double t0 = 0.0;
  /// Repeat at half the step and require agreement within `tolerance`.
  bool check_convergence = true;
  double tolerance = 1e-6;
  /// Lindblad only: per step exp(D dt/2) exp(-i[h(t_mid), .] dt) exp(D dt/2)
  /// instead of the exponential of the full Liouvillian. Requires
  /// time-independent collapse operators (always the case here).
  bool split_dissipator = false;
};

/// Ordered product of exp(-i h(t_mid) dt) over [t0, t0 + duration]. When the
/// convergence check is on, the finer of the two results is returned.
/// Throws NotConverged if halving dt moves the result by more than the
/// tolerance.
CMatrix propagate_unitary(const HamiltonianFn& h, double duration, int steps,
                          const StepOptions& opt = {});

/// L = sqrt(rate) * op.
struct CollapseOperator {
  CMatrix op;
  double rate = 0.0;
};

/// Row-major Liouvillian: vec(d rho / dt) = L vec(rho).
CMatrix liouvillian(const CMatrix& h, const std::vector<CollapseOperator>& ops);

/// Superoperator of the master equation over [t0, t0 + duration], built as
/// the ordered product of exact per-step Liouvillian exponentials.
CMatrix propagate_lindblad_map(const HamiltonianFn& h,
                               const std::vector<CollapseOperator>& ops,
                               double duration, int steps,
                               const StepOptions& opt = {});

DensityMatrix propagate_lindblad(const HamiltonianFn& h,
                                 const std::vector<CollapseOperator>& ops,
                                 const DensityMatrix& rho0, double duration,
                                 int steps, const StepOptions& opt = {});

/// A unitary or a general linear map on density matrices. The map is stored
/// as its row-major superoperator, whose columns are the images of the
/// matrix units.
class QuantumProcess {
 public:
  enum class Kind { Unitary, LindbladMap };

  QuantumProcess() = default;
  static QuantumProcess from_unitary(CMatrix u);
  static QuantumProcess from_superoperator(CMatrix s);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// Throws Unsupported for a LindbladMap.
  const CMatrix& unitary() const;
  CMatrix superoperator() const;
  CMatrix apply(const CMatrix& rho) const;
  /// `next` applied after this process.
  QuantumProcess then(const QuantumProcess& next) const;
  /// Sum_ij |i><j| (x) Lambda(|i><j|), input factor first.
  CMatrix choi() const;
  /// Largest |Tr_out(choi) - I| entry.
  double trace_preservation_error() const;
  /// Smallest eigenvalue of the Hermitian part of the Choi matrix.
  double min_choi_eigenvalue() const;

 private:
  Kind kind_ = Kind::Unitary;
  int dim_ = 0;
  CMatrix u_;
  CMatrix s_;
};

/// Per-qubit-frame idle: diag(1, 1, 1, exp(-i g_z t)), with decoherence if
/// given.
QuantumProcess free_evolution(const EffectiveZZParams& p, double t,
                              const std::optional<DecoherenceSpec>& dec = {});

/// Idle for pi / g_z.
QuantumProcess free_evolution_cz(const EffectiveZZParams& p);

enum class ModelKind { Logical4, ThreeLevel };

std::string to_string(ModelKind m);
ModelKind model_from_string(const std::string& s);

struct BareDevice {
  TransmonSpec q1;
  TransmonSpec q2;
  CouplingSpec coupling;
};

/// Everything a pulse simulation needs about the device.
struct SimulationModel {
  EffectiveZZParams params;
  Dipoles dipoles = Dipoles::harmonic(3);
  std::optional<BareDevice> bare;  ///< required for ThreeLevel
};

struct SimulationOptions {
  ModelKind model = ModelKind::Logical4;
  std::optional<DecoherenceSpec> decoherence;
  double max_dt = 1e-11;
  bool check_convergence = true;
  double tolerance = 1e-6;
  /// ThreeLevel only; Logical4 always applies the rotating-wave approximation.
  bool counter_rotating = false;
};

struct GateSimulation {
  QuantumProcess process;
  /// Mean population outside the logical subspace over the four logical
  /// basis inputs (ThreeLevel), zero for Logical4.
  double leakage = 0.0;
  /// Indices of |00>, |01>, |10>, |11> in the process space.
  std::array<int, 4> logical{0, 1, 2, 3};
};

/// Frame Hamiltonian of the logical model at time t for one waveform.
CMatrix logical_frame_hamiltonian(const EffectiveZZParams& p,
                                  const LogicalDriveCoefficients& c,
                                  const PulseWaveform& w, double t);

GateSimulation simulate_gate(const PulseWaveform& w, const SimulationModel& m,
                             const SimulationOptions& opt = {});

/// Restriction of a ThreeLevel result to the logical block (not unitary when
/// there is leakage).
CMatrix logical_block(const GateSimulation& sim);

struct CnotPhase {
  double phi = 0.0;
  double residual = 0.0;  ///< Frobenius distance of the control-excited
                          ///< block to its best phase-aligned fit
};

/// Fits exp(-i phi sz / 2) to the control-excited block. Throws
/// NotBlockDiagonal when the off-block entries exceed 1e-3.
CnotPhase extract_cnot_phase(const CMatrix& u);

/// Generalized CNOT with control on qubit 1.
CMatrix generalized_cnot(double phi);

/// Diagonal Z on `qubit` that makes the per-block phases of a
/// block-diagonal (in that qubit) two-qubit unitary equal on the |0> and |1>
/// blocks, measured against `target`. Returns diag(1, e^{i delta}) in the
/// qubit space.
CMatrix block_phase_correction(const CMatrix& u, const CMatrix& target,
                               int qubit);

}  // namespace zzforge
