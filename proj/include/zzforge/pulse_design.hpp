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

// Gate primitives for the ZZ-coupled pair: square three-part composite pulses
// that rotate one qubit independently of its neighbour, the free-evolution
// controlled-phase timing and the shaped single-pulse generalized CNOT.

#include <vector>

#include "zzforge/qcore.hpp"

namespace zzforge {

/// Sampled complex drive envelope (rad/s). The field on the drive line is
/// Re[envelope(t) e^{-i carrier t}], so a real envelope on resonance rotates
/// about x and an envelope of phase pi/2 rotates about y.
struct PulseWaveform {
  double period = 0.0;  ///< seconds per sample
  std::vector<Complex> samples;
  double carrier = 0.0;  ///< rad/s
  int qubit = 0;         ///< drive line, 0 or 1

  double duration() const { return period * static_cast<double>(samples.size()); }
  /// Envelope at time t (piecewise constant, zero outside [0, duration)).
  Complex at(double t) const;
  void validate() const;
};

/// Parameters of a BR-QR-BR composite rotation.
struct TagParams {
  double omega_br = 0.0;
  double omega_qr = 0.0;
  double tau_br = 0.0;
  double tau_qr = 0.0;
  double carrier = 0.0;
  double phase = 0.0;  ///< 0 rotates about x, pi/2 about y
  double theta = 0.0;
  double detuning = 0.0;  ///< spectator-conditioned detuning, +-g_z

  double duration() const { return 2.0 * tau_br + tau_qr; }
};

/// Absolute residuals of the four design conditions, in radians.
struct TagResiduals {
  double c1 = 0.0;  ///< sqrt(Obr^2 + D^2) tau_br - pi
  double c2 = 0.0;  ///< atan2(D, Oqr) - 2 atan2(D, Obr)
  double c3 = 0.0;  ///< sqrt(Oqr^2 + D^2) tau_qr - theta
  double c4 = 0.0;  ///< 2 Obr tau_br + Oqr tau_qr - theta, wrapped to (-pi, pi]
  double max() const;
};

/// Solves for the composite amplitudes and durations by bracketed bisection
/// in Omega_BR over [g_z/50, 50 g_z]. Returns the root of smallest total
/// duration. Throws NoRoot if no sign change is found.
TagParams solve_tag(double gz, double theta, int branch_sign = +1);

TagResiduals tag_residuals(const TagParams& p);

/// Piecewise-constant BR, QR, BR envelope. The sample count is
/// round(duration / period) and the period is adjusted so the waveform spans
/// the exact duration; each sample holds the bin average of the ideal
/// envelope, so the pulse area is exact.
PulseWaveform tag_waveform(const TagParams& p, double period, int qubit);

/// Free-evolution controlled-phase time pi / g_z.
double cz_gate_time(double gz);

struct SwiphtDesign {
  double a = 138.9;
  double tg = 0.0;
  double gz = 0.0;

  static SwiphtDesign for_coupling(double gz);
};

double swipht_gate_time(double gz);

double swipht_chi(double t, const SwiphtDesign& d);
double swipht_chi_dot(double t, const SwiphtDesign& d);
double swipht_chi_ddot(double t, const SwiphtDesign& d);

/// Shaped Rabi amplitude at time t. Throws ConstraintViolated when
/// |chi_dot| > g_z/2 and SingularChi when 2 chi is a multiple of pi.
double swipht_omega(double t, const SwiphtDesign& d);

/// Largest |chi_dot| on an n-point uniform grid over [0, t_g].
double swipht_max_chi_dot(const SwiphtDesign& d, int grid_points);

/// Real envelope sampled at bin midpoints over [0, t_g], drive on qubit 2 at
/// the target-transition frequency `carrier`.
PulseWaveform swipht_waveform(const SwiphtDesign& d, int samples,
                              double carrier = 0.0);

}  // namespace zzforge
