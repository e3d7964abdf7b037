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

#include "zzforge/device_model.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace zzforge {

namespace {

int index2(int j, int alpha, int levels2) { return j * levels2 + alpha; }

void check_guard(double denominator, double coupling, double factor,
                 const std::string& what) {
  if (coupling == 0.0) return;
  if (!std::isfinite(denominator) ||
      std::abs(denominator) <= factor * std::abs(coupling)) {
    std::ostringstream msg;
    msg << "near resonance in " << what << ": |denominator| = "
        << std::abs(denominator) << " rad/s vs " << factor << " x coupling "
        << std::abs(coupling) << " rad/s";
    throw NearResonance(msg.str());
  }
}

}  // namespace

double TransmonSpec::energy(int j) const {
  if (!energy_override.empty()) return energy_override.at(j);
  return j * omega01 + 0.5 * j * (j - 1) * anharmonicity;
}

std::vector<double> TransmonSpec::energies() const {
  std::vector<double> e(levels);
  for (int j = 0; j < levels; ++j) e[j] = energy(j);
  return e;
}

void TransmonSpec::validate() const {
  if (levels < 2 || levels > 5)
    throw ValidationError("transmon truncation must be between 2 and 5 levels");
  if (!energy_override.empty() &&
      static_cast<int>(energy_override.size()) < levels)
    throw ValidationError("energy override shorter than the truncation");
  if (energy_override.empty() && anharmonicity >= 0.0)
    throw ValidationError("transmon anharmonicity must be negative");
}

std::string to_string(Topology t) {
  return t == Topology::DirectCapacitive ? "direct_capacitive"
                                         : "resonator_mediated";
}

Topology topology_from_string(const std::string& s) {
  if (s == "direct_capacitive") return Topology::DirectCapacitive;
  if (s == "resonator_mediated") return Topology::ResonatorMediated;
  throw ValidationError("unknown topology '" + s + "'");
}

double CouplingSpec::g(int j, int alpha) const {
  if (g_override) {
    if (j < g_override->rows() && alpha < g_override->cols())
      return (*g_override)(j, alpha);
    return 0.0;
  }
  return g1 * std::sqrt(j + 1.0) * std::sqrt(alpha + 1.0);
}

double CouplingSpec::h_1(int j) const {
  if (!h1_override.empty())
    return j < static_cast<int>(h1_override.size()) ? h1_override[j] : 0.0;
  return h1 * std::sqrt(j + 1.0);
}

double CouplingSpec::h_2(int alpha) const {
  if (!h2_override.empty())
    return alpha < static_cast<int>(h2_override.size()) ? h2_override[alpha]
                                                        : 0.0;
  return h2 * std::sqrt(alpha + 1.0);
}

void CouplingSpec::validate() const {
  if (g1 < 0.0 || h1 < 0.0 || h2 < 0.0)
    throw ValidationError("coupling magnitudes must be non-negative");
  if (topology == Topology::ResonatorMediated && photon_cutoff < 1)
    throw ValidationError("photon cutoff must be at least 1");
}

double DecoherenceSpec::dephasing_rate(int qubit) const {
  return 1.0 / t2star.at(qubit) - 1.0 / (2.0 * t1.at(qubit));
}

void DecoherenceSpec::validate() const {
  for (int q = 0; q < 2; ++q) {
    if (!(t1[q] > 0.0) || !(t2star[q] > 0.0))
      throw ValidationError("T1 and T2* must be positive");
    if (t2star[q] > 2.0 * t1[q])
      throw ValidationError("qubit " + std::to_string(q + 1) +
                            ": T2* exceeds 2 T1 (negative pure dephasing)");
  }
}

Dipoles Dipoles::harmonic(int levels) {
  Dipoles d;
  for (int j = 0; j + 1 < levels; ++j) {
    d.d1.push_back(std::sqrt(j + 1.0));
    d.d2.push_back(std::sqrt(j + 1.0));
  }
  return d;
}

CMatrix build_capacitive_hamiltonian(const TransmonSpec& q1,
                                     const TransmonSpec& q2,
                                     const CouplingSpec& c) {
  if (c.topology != Topology::DirectCapacitive)
    throw WrongTopology("build_capacitive_hamiltonian needs direct coupling");
  const int n1 = q1.levels, n2 = q2.levels;
  CMatrix h = CMatrix::Zero(n1 * n2, n1 * n2);
  for (int j = 0; j < n1; ++j)
    for (int a = 0; a < n2; ++a)
      h(index2(j, a, n2), index2(j, a, n2)) = q1.energy(j) + q2.energy(a);
  // g_{j,a} |j><j+1| (x) |a+1><a| + h.c.
  for (int j = 0; j + 1 < n1; ++j)
    for (int a = 0; a + 1 < n2; ++a) {
      const int row = index2(j, a + 1, n2), col = index2(j + 1, a, n2);
      h(row, col) = c.g(j, a);
      h(col, row) = c.g(j, a);
    }
  return h;
}

CMatrix build_resonator_hamiltonian(const TransmonSpec& q1,
                                    const TransmonSpec& q2,
                                    const CouplingSpec& c) {
  if (c.topology != Topology::ResonatorMediated)
    throw WrongTopology("build_resonator_hamiltonian needs a cavity");
  const int n1 = q1.levels, n2 = q2.levels, np = c.photon_cutoff + 1;
  const int dim = n1 * n2 * np;
  auto idx = [&](int j, int a, int n) { return (j * n2 + a) * np + n; };
  CMatrix h = CMatrix::Zero(dim, dim);
  for (int j = 0; j < n1; ++j)
    for (int a = 0; a < n2; ++a)
      for (int n = 0; n < np; ++n)
        h(idx(j, a, n), idx(j, a, n)) =
            c.cavity_frequency * n + q1.energy(j) + q2.energy(a);
  // h_{1,j} a^dag |j><j+1| + h_{2,a} a^dag |a><a+1| + h.c.
  for (int n = 0; n + 1 < np; ++n) {
    const double amp = std::sqrt(n + 1.0);
    for (int a = 0; a < n2; ++a)
      for (int j = 0; j + 1 < n1; ++j) {
        const int row = idx(j, a, n + 1), col = idx(j + 1, a, n);
        h(row, col) = c.h_1(j) * amp;
        h(col, row) = c.h_1(j) * amp;
      }
    for (int j = 0; j < n1; ++j)
      for (int a = 0; a + 1 < n2; ++a) {
        const int row = idx(j, a, n + 1), col = idx(j, a + 1, n);
        h(row, col) = c.h_2(a) * amp;
        h(col, row) = c.h_2(a) * amp;
      }
  }
  return h;
}

EffectiveZZParams sw_capacitive(const TransmonSpec& q1, const TransmonSpec& q2,
                                const CouplingSpec& c, SwOptions opt) {
  if (c.topology != Topology::DirectCapacitive)
    throw WrongTopology("sw_capacitive needs direct coupling");
  const int n1 = q1.levels, n2 = q2.levels;
  auto w1 = [&](int j) { return q1.energy(j); };
  auto w2 = [&](int a) { return q2.energy(a); };

  EffectiveZZParams p;
  p.beta = RMatrix::Zero(n1 - 1, n2 - 1);
  for (int j = 0; j + 1 < n1; ++j)
    for (int a = 0; a + 1 < n2; ++a) {
      const double den = w1(j) - w1(j + 1) + w2(a + 1) - w2(a);
      const double g = c.g(j, a);
      check_guard(den, g, opt.guard_factor,
                  "beta(" + std::to_string(j) + "," + std::to_string(a) + ")");
      p.beta(j, a) = g == 0.0 ? 0.0 : -g / den;
    }

  const double g00 = c.g(0, 0);
  p.eta = g00 == 0.0 ? 0.0 : g00 * g00 / (w1(0) + w2(1) - w1(1) - w2(0));
  double lambda = 0.0;
  if (n1 > 2) {
    const double g10 = c.g(1, 0);
    if (g10 != 0.0) lambda += g10 * g10 / (w1(1) + w2(1) - w1(2) - w2(0));
  }
  if (n2 > 2) {
    const double g01 = c.g(0, 1);
    if (g01 != 0.0) lambda += g01 * g01 / (w1(1) + w2(1) - w1(0) - w2(2));
  }
  p.lambda_zz = lambda;
  p.omega1 = w1(1) - w1(0) - p.eta;
  p.omega2 = w2(1) - w2(0) + p.eta;
  p.gz = lambda;
  p.level1 = {w1(0), w1(1)};
  p.level2 = {w2(0), w2(1)};
  return p;
}

ResonatorReduction reduce_resonator(const TransmonSpec& q1,
                                    const TransmonSpec& q2,
                                    const CouplingSpec& c, SwOptions opt) {
  if (c.topology != Topology::ResonatorMediated)
    throw WrongTopology("reduce_resonator needs a cavity");
  const double wc = c.cavity_frequency;
  const int n1 = q1.levels, n2 = q2.levels;
  const auto e1 = q1.energies();
  const auto e2 = q2.energies();

  ResonatorReduction r;
  std::vector<double> d1(n1 - 1), d2(n2 - 1);  // e_{k+1} - e_k - wc
  for (int j = 0; j + 1 < n1; ++j) {
    d1[j] = e1[j + 1] - e1[j] - wc;
    check_guard(d1[j], c.h_1(j), opt.guard_factor,
                "transmon 1 dispersive shift " + std::to_string(j));
    r.gamma1.push_back(-c.h_1(j) / d1[j]);
  }
  for (int a = 0; a + 1 < n2; ++a) {
    d2[a] = e2[a + 1] - e2[a] - wc;
    check_guard(d2[a], c.h_2(a), opt.guard_factor,
                "transmon 2 dispersive shift " + std::to_string(a));
    r.gamma2.push_back(-c.h_2(a) / d2[a]);
  }

  std::vector<double> t1(e1), t2(e2);
  for (int j = 1; j < n1; ++j) t1[j] += c.h_1(j - 1) * c.h_1(j - 1) / d1[j - 1];
  for (int a = 1; a < n2; ++a) t2[a] += c.h_2(a - 1) * c.h_2(a - 1) / d2[a - 1];

  RMatrix gt = RMatrix::Zero(n1 - 1, n2 - 1);
  for (int j = 0; j + 1 < n1; ++j)
    for (int a = 0; a + 1 < n2; ++a)
      gt(j, a) = c.h_1(j) * c.h_2(a) * (d1[j] + d2[a]) / (2.0 * d1[j] * d2[a]);

  r.q1_tilde = q1;
  r.q1_tilde.energy_override = t1;
  r.q2_tilde = q2;
  r.q2_tilde.energy_override = t2;
  r.coupling_tilde.topology = Topology::DirectCapacitive;
  r.coupling_tilde.g_override = gt;
  return r;
}

EffectiveZZParams sw_resonator(const TransmonSpec& q1, const TransmonSpec& q2,
                               const CouplingSpec& c, SwOptions opt) {
  const ResonatorReduction r = reduce_resonator(q1, q2, c, opt);
  EffectiveZZParams p =
      sw_capacitive(r.q1_tilde, r.q2_tilde, r.coupling_tilde, opt);
  p.gamma1 = r.gamma1;
  p.gamma2 = r.gamma2;
  return p;
}

CMatrix effective_hamiltonian(const EffectiveZZParams& p) {
  // sz = |1><1| - |0><0| on each factor, basis |00>, |01>, |10>, |11>.
  const double s1[4] = {-1, -1, 1, 1};
  const double s2[4] = {-1, 1, -1, 1};
  CMatrix h = CMatrix::Zero(4, 4);
  for (int k = 0; k < 4; ++k)
    h(k, k) = (p.omega1 + p.gz / 2) * s1[k] / 2 +
              (p.omega2 + p.gz / 2) * s2[k] / 2 + p.gz * s1[k] * s2[k] / 4;
  return h;
}

double TransitionTable::energy_of(std::span<const int> label) const {
  for (const auto& l : levels)
    if (std::equal(label.begin(), label.end(), l.label.begin(),
                   l.label.begin() + std::min(label.size(), l.label.size())))
      if (std::all_of(l.label.begin() + label.size(), l.label.end(),
                      [](int v) { return v == 0; }))
        return l.energy;
  throw AmbiguousLabel("no dressed level carries the requested label");
}

TransitionTable dressed_spectrum(const CMatrix& full_h,
                                 std::span<const int> dims) {
  if (!is_hermitian(full_h))
    throw NonHermitian("dressed_spectrum: Hamiltonian is not Hermitian");
  if (dims.size() < 2 || dims[0] < 3 || dims[1] < 3)
    throw Unsupported("dressed_spectrum needs at least 3 levels per transmon");
  long total = 1;
  for (int d : dims) total *= d;
  if (total != full_h.rows())
    throw DimensionMismatch("dressed_spectrum: dims do not match Hamiltonian");

  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (full_h + full_h.adjoint()));
  TransitionTable table;
  for (Eigen::Index k = 0; k < full_h.rows(); ++k) {
    Eigen::Index arg = 0;
    const double overlap =
        es.eigenvectors().col(k).cwiseAbs2().maxCoeff(&arg);
    LabeledLevel lvl;
    lvl.energy = es.eigenvalues()(k);
    lvl.overlap = overlap;
    lvl.label.assign(dims.size(), 0);
    long rest = arg;
    for (int f = static_cast<int>(dims.size()) - 1; f >= 0; --f) {
      lvl.label[f] = static_cast<int>(rest % dims[f]);
      rest /= dims[f];
    }
    table.levels.push_back(std::move(lvl));
  }

  auto find = [&](int j, int a) {
    const LabeledLevel* hit = nullptr;
    for (const auto& l : table.levels) {
      if (l.label[0] != j || l.label[1] != a) continue;
      if (!std::all_of(l.label.begin() + 2, l.label.end(),
                       [](int v) { return v == 0; }))
        continue;
      if (hit)
        throw AmbiguousLabel("two dressed levels claim |" + std::to_string(j) +
                             std::to_string(a) + ">");
      hit = &l;
    }
    if (!hit || hit->overlap < 0.5)
      throw AmbiguousLabel("no dressed level with overlap >= 0.5 on |" +
                           std::to_string(j) + std::to_string(a) + ">");
    return hit->energy;
  };
  const double e00 = find(0, 0), e01 = find(0, 1), e10 = find(1, 0),
               e11 = find(1, 1), e20 = find(2, 0), e02 = find(0, 2);
  table.t00_10 = e10 - e00;
  table.t00_01 = e01 - e00;
  table.t01_11 = e11 - e01;
  table.t10_11 = e11 - e10;
  table.t10_20 = e20 - e10;
  table.t01_02 = e02 - e01;
  return table;
}

EffectiveZZParams effective_params_from_spectrum(
    const TransitionTable& table, const EffectiveZZParams& dressing) {
  EffectiveZZParams p = dressing;
  p.omega1 = table.t00_10;
  p.omega2 = table.t00_01;
  p.gz = 0.5 * (table.zz_branch_qubit1() + table.zz_branch_qubit2());
  p.lambda_zz = p.gz;
  // Level energies chosen so the logical diagonal reproduces omega1, omega2
  // and gz with |00> at zero.
  p.level1 = {0.0, p.omega1 + p.eta};
  p.level2 = {0.0, p.omega2 - p.eta};
  return p;
}

LogicalDriveCoefficients logical_drive_coefficients(const EffectiveZZParams& p,
                                                    const Dipoles& d) {
  auto beta = [&](int j, int a) {
    return (j < p.beta.rows() && a < p.beta.cols()) ? p.beta(j, a) : 0.0;
  };
  auto dip = [](const std::vector<double>& v, int k) {
    return k < static_cast<int>(v.size()) ? v[k] : 0.0;
  };
  const double d10 = dip(d.d1, 0), d11 = dip(d.d1, 1);
  const double d20 = dip(d.d2, 0), d21 = dip(d.d2, 1);
  const double b00 = beta(0, 0), b10 = beta(1, 0), b01 = beta(0, 1);

  LogicalDriveCoefficients c;
  c.drive1(0, 1) = -d10 * b00;
  c.drive1(0, 2) = d10;
  c.drive1(1, 3) = d10;
  c.drive1(2, 3) = d10 * b00 - d11 * b10;

  c.drive2(0, 1) = d20;
  c.drive2(0, 2) = d20 * b00;
  c.drive2(1, 3) = d21 * b01 - d20 * b00;
  c.drive2(2, 3) = d20;
  return c;
}

CMatrix logical_drive_hamiltonian(const EffectiveZZParams& p, Complex omega1,
                                  Complex omega2, const Dipoles& d) {
  const auto c = logical_drive_coefficients(p, d);
  CMatrix h = CMatrix::Zero(4, 4);
  h(0, 0) = p.level1[0] + p.level2[0];
  h(1, 1) = p.level1[0] + p.level2[1] + p.eta;
  h(2, 2) = p.level1[1] + p.level2[0] - p.eta;
  h(3, 3) = p.level1[1] + p.level2[1] + p.lambda_zz;
  for (int r = 0; r < 4; ++r)
    for (int col = r + 1; col < 4; ++col) {
      const Complex v = c.drive1(r, col) * omega1 + c.drive2(r, col) * omega2;
      h(r, col) = v;
      h(col, r) = std::conj(v);
    }
  return h;
}

}  // namespace zzforge
