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

// Bare transmon Hamiltonians, Schrieffer-Wolff reductions to the logical ZZ
// model, dressed spectra and the dressed logical drive matrix.
//
// All frequencies are angular (rad/s). Two-transmon states |j, alpha> are
// indexed j * levels2 + alpha; with a cavity the photon number is the fastest
// index.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zzforge/qcore.hpp"

namespace zzforge {

/// One transmon truncated to `levels` states. Level energies default to
/// e_j = j * omega01 + j (j - 1) / 2 * anharmonicity.
struct TransmonSpec {
  int levels = 3;
  double omega01 = 0.0;
  double anharmonicity = 0.0;
  /// Explicit per-level energies; overrides the ladder formula when set.
  std::vector<double> energy_override;

  double energy(int j) const;
  std::vector<double> energies() const;
  void validate() const;
};

enum class Topology { DirectCapacitive, ResonatorMediated };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

struct CouplingSpec {
  Topology topology = Topology::DirectCapacitive;

  // Direct capacitive: g_{j,alpha} = g1 sqrt(j+1) sqrt(alpha+1) unless an
  // explicit matrix is given.
  double g1 = 0.0;
  std::optional<RMatrix> g_override;

  // Resonator mediated: h_{i,k} = h_i sqrt(k+1) unless overridden.
  double cavity_frequency = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  std::vector<double> h1_override;
  std::vector<double> h2_override;
  int photon_cutoff = 3;

  double g(int j, int alpha) const;
  double h_1(int j) const;
  double h_2(int alpha) const;
  void validate() const;
};

struct SwOptions {
  /// Required ratio |denominator| / coupling for every perturbative term.
  double guard_factor = 10.0;
};

/// Parameters of the logical ZZ model plus the dressing coefficients that
/// produced them.
struct EffectiveZZParams {
  double omega1 = 0.0;  ///< |~00> <-> |~10>
  double omega2 = 0.0;  ///< |~00> <-> |~01>
  double gz = 0.0;
  double eta = 0.0;
  double lambda_zz = 0.0;
  RMatrix beta;                ///< beta(j, alpha), dimensionless
  std::vector<double> gamma1;  ///< resonator case only
  std::vector<double> gamma2;
  /// Energies of levels 0 and 1 of each transmon that enter the logical
  /// block (bare for capacitive, tilde-shifted for the resonator case).
  std::array<double, 2> level1{};
  std::array<double, 2> level2{};
};

/// T1 and Ramsey T2* per qubit, in seconds.
struct DecoherenceSpec {
  std::array<double, 2> t1{};
  std::array<double, 2> t2star{};

  /// gamma_phi = 1/T2* - 1/(2 T1).
  double dephasing_rate(int qubit) const;
  void validate() const;
};

/// Transmon charge matrix elements <j|n|j+1>, harmonic default sqrt(j+1).
struct Dipoles {
  std::vector<double> d1;
  std::vector<double> d2;
  static Dipoles harmonic(int levels = 3);
};

/// Two directly coupled transmons; Hermitian, dim levels1*levels2.
CMatrix build_capacitive_hamiltonian(const TransmonSpec& q1,
                                     const TransmonSpec& q2,
                                     const CouplingSpec& c);

/// Two transmons sharing one cavity; dim levels1*levels2*(photon_cutoff+1).
CMatrix build_resonator_hamiltonian(const TransmonSpec& q1,
                                    const TransmonSpec& q2,
                                    const CouplingSpec& c);

/// Direct-coupling Schrieffer-Wolff reduction. Throws NearResonance when any
/// |denominator| <= guard_factor * g_{j,alpha}.
EffectiveZZParams sw_capacitive(const TransmonSpec& q1, const TransmonSpec& q2,
                                const CouplingSpec& c, SwOptions opt = {});

/// Intermediate of the cavity elimination: shifted levels and effective
/// transmon-transmon couplings, already packaged as a capacitive problem.
struct ResonatorReduction {
  std::vector<double> gamma1;
  std::vector<double> gamma2;
  TransmonSpec q1_tilde;
  TransmonSpec q2_tilde;
  CouplingSpec coupling_tilde;
};

ResonatorReduction reduce_resonator(const TransmonSpec& q1,
                                    const TransmonSpec& q2,
                                    const CouplingSpec& c, SwOptions opt = {});

/// Cavity-mediated reduction followed by the capacitive formulas with tildes.
EffectiveZZParams sw_resonator(const TransmonSpec& q1, const TransmonSpec& q2,
                               const CouplingSpec& c, SwOptions opt = {});

/// 4x4 diagonal logical Hamiltonian
/// (w1 + gz/2) sz1/2 + (w2 + gz/2) sz2/2 + gz sz1 sz2 / 4, sz = |1><1| - |0><0|.
CMatrix effective_hamiltonian(const EffectiveZZParams& p);

struct LabeledLevel {
  std::vector<int> label;  ///< bare occupation per factor
  double energy = 0.0;
  double overlap = 0.0;    ///< |<bare|dressed>|^2
};

/// Dressed eigenlevels of the two-transmon ladder and the transitions that
/// spectroscopy resolves.
struct TransitionTable {
  std::vector<LabeledLevel> levels;
  double t00_10 = 0.0;
  double t00_01 = 0.0;
  double t01_11 = 0.0;
  double t10_11 = 0.0;
  double t10_20 = 0.0;
  double t01_02 = 0.0;

  /// ZZ as seen on qubit 1: (01<->11) - (00<->10).
  double zz_branch_qubit1() const { return t01_11 - t00_10; }
  /// ZZ as seen on qubit 2: (10<->11) - (00<->01).
  double zz_branch_qubit2() const { return t10_11 - t00_01; }
  double energy_of(std::span<const int> label) const;
};

/// Diagonalizes `full_h` and labels eigenvectors by largest bare overlap.
/// Factors beyond the first two (a cavity) must be in their ground state for
/// the tabulated levels. Throws AmbiguousLabel if a needed level has overlap
/// below 0.5 or two eigenvectors claim the same label.
TransitionTable dressed_spectrum(const CMatrix& full_h, std::span<const int> dims);

/// Logical parameters taken from a measured (or exactly computed) spectrum,
/// keeping the dressing coefficients of `dressing`. gz is the mean of the two
/// ZZ branches.
EffectiveZZParams effective_params_from_spectrum(const TransitionTable& table,
                                                 const EffectiveZZParams& dressing);

/// Upper-triangular coefficient of Omega_i in each entry of the dressed
/// logical drive matrix.
struct LogicalDriveCoefficients {
  RMatrix drive1 = RMatrix::Zero(4, 4);
  RMatrix drive2 = RMatrix::Zero(4, 4);
};

LogicalDriveCoefficients logical_drive_coefficients(const EffectiveZZParams& p,
                                                    const Dipoles& d);

/// Full effective logical Hamiltonian with (complex) drive amplitudes.
CMatrix logical_drive_hamiltonian(const EffectiveZZParams& p, Complex omega1,
                                  Complex omega2, const Dipoles& d);

// Fit of bare parameters to the six resolved dressed transitions.

struct DressedTransitions {
  double t00_10 = 0.0;
  double t00_01 = 0.0;
  double t01_11 = 0.0;
  double t10_11 = 0.0;
  double t10_20 = 0.0;
  double t01_02 = 0.0;
};

struct CalibrationResult {
  TransmonSpec q1;
  TransmonSpec q2;
  CouplingSpec coupling;
  TransitionTable fitted;
  double rms_residual = 0.0;  ///< rad/s
};

/// Least-squares inversion (bare omega01, anharmonicity per transmon, g1) of
/// the capacitive model at the given truncation.
CalibrationResult calibrate_capacitive(const DressedTransitions& target,
                                       int levels = 3);

}  // namespace zzforge
