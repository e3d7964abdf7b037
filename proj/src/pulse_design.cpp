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

#include "zzforge/pulse_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace zzforge {

Complex PulseWaveform::at(double t) const {
  if (t < 0.0 || samples.empty()) return 0.0;
  const auto k = static_cast<std::size_t>(t / period);
  return k < samples.size() ? samples[k] : Complex{0.0};
}

void PulseWaveform::validate() const {
  if (!(period > 0.0)) throw ValidationError("waveform period must be positive");
  if (qubit != 0 && qubit != 1) throw ValidationError("drive line must be 0 or 1");
  for (const auto& s : samples)
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw ValidationError("waveform envelope is not finite");
}

namespace {

double wrap_pi(double x) {
  x = std::remainder(x, kTwoPi);
  return x <= -kPi ? x + kTwoPi : x;
}

// Everything follows from Omega_BR once C1-C3 are imposed.
TagParams tag_from_br(double omega_br, double d, double theta) {
  TagParams p;
  p.omega_br = omega_br;
  p.theta = theta;
  const double phi = std::atan2(d, omega_br);
  p.tau_br = kPi / std::hypot(omega_br, d);
  p.omega_qr = d * std::cos(2.0 * phi) / std::sin(2.0 * phi);
  p.tau_qr = theta / std::hypot(p.omega_qr, d);
  return p;
}

double c4_raw(const TagParams& p) {
  return 2.0 * p.omega_br * p.tau_br + p.omega_qr * p.tau_qr - p.theta;
}

}  // namespace

double TagResiduals::max() const {
  return std::max({std::abs(c1), std::abs(c2), std::abs(c3), std::abs(c4)});
}

TagResiduals tag_residuals(const TagParams& p) {
  const double d = std::abs(p.detuning);
  TagResiduals r;
  r.c1 = std::hypot(p.omega_br, d) * p.tau_br - kPi;
  r.c2 = std::atan2(d, p.omega_qr) - 2.0 * std::atan2(d, p.omega_br);
  r.c3 = std::hypot(p.omega_qr, d) * p.tau_qr - p.theta;
  r.c4 = wrap_pi(c4_raw(p));
  return r;
}

TagParams solve_tag(double gz, double theta, int branch_sign) {
  if (!(gz > 0.0)) throw OutOfRange("solve_tag: g_z must be positive");
  if (!(theta > 0.0 && theta <= kPi))
    throw OutOfRange("solve_tag: rotation angle must lie in (0, pi]");
  if (branch_sign != 1 && branch_sign != -1)
    throw OutOfRange("solve_tag: branch sign must be +1 or -1");

  const double lo = gz / 50.0, hi = gz * 50.0;
  auto f = [&](double omega_br) {
    return std::sin(0.5 * c4_raw(tag_from_br(omega_br, gz, theta)));
  };

  constexpr int kScan = 4000;
  const double ratio = std::log(hi / lo) / kScan;
  bool found = false;
  TagParams best;
  double x0 = lo, f0 = f(lo);
  for (int k = 1; k <= kScan; ++k) {
    const double x1 = lo * std::exp(ratio * k);
    const double f1 = f(x1);
    if (f0 == 0.0 || (f0 < 0.0) != (f1 < 0.0)) {
      double a = x0, b = x1, fa = f0;
      if (f0 != 0.0) {
        for (int it = 0; it < 400 && (b - a) > 1e-14 * b; ++it) {
          const double m = 0.5 * (a + b);
          const double fm = f(m);
          if (fm == 0.0) { a = b = m; break; }
          if ((fa < 0.0) == (fm < 0.0)) { a = m; fa = fm; } else { b = m; }
        }
      }
      const double root = f0 == 0.0 ? x0 : 0.5 * (a + b);
      TagParams cand = tag_from_br(root, gz, theta);
      if (!found || cand.duration() < best.duration()) {
        best = cand;
        found = true;
      }
    }
    x0 = x1;
    f0 = f1;
  }
  if (!found) {
    std::ostringstream msg;
    msg << "solve_tag: no root for Omega_BR in [" << lo << ", " << hi
        << "] rad/s";
    throw NoRoot(msg.str());
  }
  best.detuning = branch_sign * gz;
  return best;
}

PulseWaveform tag_waveform(const TagParams& p, double period, int qubit) {
  if (!(period > 0.0) || period > p.tau_br / 50.0)
    throw OutOfRange("tag_waveform: sample period must not exceed tau_BR/50");
  const double total = p.duration();
  const long n = std::max(1L, std::lround(total / period));
  PulseWaveform w;
  w.period = total / static_cast<double>(n);
  w.carrier = p.carrier;
  w.qubit = qubit;
  w.samples.resize(n);

  const double edges[4] = {0.0, p.tau_br, p.tau_br + p.tau_qr, total};
  const double amps[3] = {p.omega_br, p.omega_qr, p.omega_br};
  const Complex rot = std::polar(1.0, p.phase);
  for (long k = 0; k < n; ++k) {
    const double a = k * w.period, b = (k + 1) * w.period;
    double area = 0.0;
    for (int s = 0; s < 3; ++s) {
      const double overlap =
          std::max(0.0, std::min(b, edges[s + 1]) - std::max(a, edges[s]));
      area += amps[s] * overlap;
    }
    w.samples[k] = rot * (area / w.period);
  }
  return w;
}

double cz_gate_time(double gz) {
  if (!(gz > 0.0)) throw OutOfRange("cz_gate_time: g_z must be positive");
  return kPi / gz;
}

double swipht_gate_time(double gz) {
  if (!(gz > 0.0)) throw OutOfRange("swipht_gate_time: g_z must be positive");
  return 5.87 / gz;
}

SwiphtDesign SwiphtDesign::for_coupling(double gz) {
  SwiphtDesign d;
  d.gz = gz;
  d.tg = swipht_gate_time(gz);
  return d;
}

namespace {

double unit_time(double t, const SwiphtDesign& d) {
  const double slack = 1e-12 * d.tg;
  if (!(t >= -slack && t <= d.tg + slack))
    throw OutOfRange("SWIPHT time outside [0, t_g]");
  return std::clamp(t / d.tg, 0.0, 1.0);
}

}  // namespace

double swipht_chi(double t, const SwiphtDesign& d) {
  const double s = unit_time(t, d);
  return d.a * std::pow(s, 4) * std::pow(1.0 - s, 4) + kPi / 4.0;
}

double swipht_chi_dot(double t, const SwiphtDesign& d) {
  const double s = unit_time(t, d), u = 1.0 - s;
  return d.a * 4.0 * s * s * s * u * u * u * (u - s) / d.tg;
}

double swipht_chi_ddot(double t, const SwiphtDesign& d) {
  const double s = unit_time(t, d), u = 1.0 - s;
  return d.a * (12.0 * s * s * std::pow(u, 4) - 32.0 * std::pow(s * u, 3) +
                12.0 * std::pow(s, 4) * u * u) /
         (d.tg * d.tg);
}

double swipht_omega(double t, const SwiphtDesign& d) {
  const double cd = swipht_chi_dot(t, d);
  const double r2 = d.gz * d.gz / 4.0 - cd * cd;
  if (r2 < 0.0) {
    std::ostringstream msg;
    msg << "SWIPHT constraint |chi_dot| <= g_z/2 violated at t = " << t
        << " s (|chi_dot| = " << std::abs(cd) << ", g_z/2 = " << d.gz / 2 << ")";
    throw ConstraintViolated(msg.str());
  }
  const double chi = swipht_chi(t, d);
  const double s2 = std::sin(2.0 * chi);
  if (std::abs(s2) < 1e-12)
    throw SingularChi("SWIPHT: 2 chi is a multiple of pi");
  const double r = std::sqrt(r2);
  const double cdd = swipht_chi_ddot(t, d);
  // At the endpoints chi_ddot and r both vanish only if |chi_dot| = g_z/2,
  // which the constraint excludes there.
  return (r > 0.0 ? cdd / r : 0.0) - 2.0 * r * std::cos(2.0 * chi) / s2;
}

double swipht_max_chi_dot(const SwiphtDesign& d, int grid_points) {
  if (grid_points < 2) throw OutOfRange("grid needs at least 2 points");
  double worst = 0.0;
  for (int k = 0; k < grid_points; ++k) {
    const double t = d.tg * k / (grid_points - 1);
    worst = std::max(worst, std::abs(swipht_chi_dot(t, d)));
  }
  return worst;
}

PulseWaveform swipht_waveform(const SwiphtDesign& d, int samples,
                              double carrier) {
  if (samples < 512)
    throw OutOfRange("swipht_waveform: at least 512 samples required");
  if (!(d.gz > 0.0) || !(d.tg > 0.0))
    throw ValidationError("swipht_waveform: design needs g_z > 0 and t_g > 0");
  // Locate the worst point first so the error names it.
  double worst = 0.0, worst_t = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double t = d.tg * k / samples;
    const double v = std::abs(swipht_chi_dot(t, d));
    if (v > worst) { worst = v; worst_t = t; }
  }
  if (worst > d.gz / 2.0) {
    std::ostringstream msg;
    msg << "SWIPHT constraint violated: |chi_dot| = " << worst << " at t = "
        << worst_t << " s exceeds g_z/2 = " << d.gz / 2.0;
    throw ConstraintViolated(msg.str());
  }
  PulseWaveform w;
  w.period = d.tg / samples;
  w.carrier = carrier;
  w.qubit = 1;
  w.samples.resize(samples);
  for (int k = 0; k < samples; ++k)
    w.samples[k] = swipht_omega((k + 0.5) * w.period, d);
  return w;
}

}  // namespace zzforge
