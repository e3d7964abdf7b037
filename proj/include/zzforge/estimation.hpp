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

// Statistical reconstruction: maximum-likelihood states, Pauli transfer
// matrices with physicality constraints, fidelities and decay fits.

#include <string>
#include <vector>

#include "zzforge/dynamics.hpp"
#include "zzforge/qcore.hpp"

namespace zzforge {

/// 16 x 16 real matrix, R_ij = Tr[P_i Lambda(P_j)] / 4, Pauli order of
/// pauli_basis(2).
using PauliTransferMatrix = RMatrix;

// Tomography settings model: rotation applied before a joint z readout.

struct TomographySetting {
  std::string label;
  CMatrix rotation;  ///< 4 x 4
};

/// {I, X(pi/2), Y(pi/2)} on each qubit, qubit 1 varying slowest.
std::vector<TomographySetting> tomography_settings();

/// Projectors R^dag |k><k| R for the four joint outcomes 00, 01, 10, 11.
std::vector<CMatrix> setting_povm(const CMatrix& rotation);

/// Outcome counts of one measurement setting.
struct SettingCounts {
  std::vector<CMatrix> povm;
  std::vector<double> counts;
};

struct MleOptions {
  int max_iterations = 10000;
  double gradient_tolerance = 1e-8;
};

struct MleStateResult {
  DensityMatrix rho;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  /// Mean log-likelihood per shot after each accepted step.
  std::vector<double> log_likelihood;
};

/// Least-squares inversion in the Pauli basis, clipped to the PSD cone and
/// renormalized.
CMatrix linear_inversion_state(const std::vector<SettingCounts>& data);

/// Gradient ascent with backtracking on rho = T^dag T / Tr(T^dag T), T lower
/// triangular. Does not throw on non-convergence; inspect `converged`.
MleStateResult mle_density_matrix(const std::vector<SettingCounts>& data,
                                  const MleOptions& opt = {});

/// <psi|rho|psi>.
double state_fidelity(const DensityMatrix& rho, const CVector& psi);

PauliTransferMatrix ptm_of_process(const QuantumProcess& p);
PauliTransferMatrix ptm_of_unitary(const CMatrix& u);
/// PTM of a simulated gate restricted to the logical subspace: inputs
/// embedded at the logical indices, outputs projected back (trace decreasing
/// under leakage).
PauliTransferMatrix logical_ptm(const GateSimulation& sim);

/// C = sum_ij R_ij P_j^T (x) P_i / 4 (input factor first) and back.
CMatrix ptm_to_choi(const PauliTransferMatrix& r);
PauliTransferMatrix choi_to_ptm(const CMatrix& c);

/// Counts for one preparation: the assumed input state and every setting.
struct ProcessObservation {
  CMatrix input;  ///< density matrix the analysis assumes was prepared
  std::vector<SettingCounts> settings;
};

struct PtmOptions {
  int max_alternations = 10000;
  double projection_tolerance = 1e-9;
  /// Likelihood refinement after the projection.
  int mle_iterations = 500;
  bool refine = true;
};

struct PtmResult {
  PauliTransferMatrix r;
  PauliTransferMatrix linear;  ///< unconstrained linear inversion
  bool converged = false;
  int alternations = 0;
  int mle_iterations = 0;
  double min_choi_eigenvalue = 0.0;
};

/// Linear inversion, alternating (Dykstra) projection of the Choi matrix onto
/// the PSD cone and the trace-preserving plane, then fixed-point likelihood
/// iterations that keep the map completely positive and trace preserving.
PtmResult mle_ptm(const std::vector<ProcessObservation>& data,
                  const PtmOptions& opt = {});

/// Closest CPTP Choi matrix in Frobenius norm by Dykstra alternation.
CMatrix project_cptp(const CMatrix& choi, int max_alternations, double tol,
                     int* alternations = nullptr, bool* converged = nullptr);

/// (Tr[Rexp^T Rideal] / 4 + 1) / 5.
double average_gate_fidelity(const PauliTransferMatrix& rexp,
                             const PauliTransferMatrix& rideal);

/// Tr[Ru^T Ru] / 15 over the unital 15 x 15 block.
double ptm_purity(const PauliTransferMatrix& r);

/// |Tr(u^dag v)|^2 / d^2.
double unitary_fidelity(const CMatrix& u, const CMatrix& v);

/// Per-block fidelities of two two-qubit matrices partitioned by the state of
/// `spectator`, each block with its own phase: |Tr(u_b^dag v_b)|^2 / 4.
std::array<double, 2> block_fidelities(const CMatrix& u, const CMatrix& v,
                                       int spectator);

struct DecayPoint {
  double m = 0.0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct DecayFit {
  double a = 0.0;
  double p = 1.0;
  double b = 0.0;
  /// 1 - (1 - p) / 2 per pi/2 gate.
  double fidelity = 1.0;
  RMatrix covariance = RMatrix::Zero(3, 3);  ///< order (A, p, B)
  std::vector<double> residuals;
  double rss = 0.0;
  /// B pinned to 1/2 because the free fit could not resolve the decay.
  bool offset_fixed = false;
};

/// Least squares A p^m + B with A, B in [0, 1] and p in (0, 1]. When the
/// standard error of p is not smaller than 1 - p, or the fitted decay over
/// the measured lengths is within three times the noise, the fit is repeated
/// with B = 1/2. Throws FitFailed with fewer than 4 points or non-finite
/// data.
DecayFit fit_decay(const std::vector<DecayPoint>& table);

}  // namespace zzforge
