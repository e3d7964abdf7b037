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

#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "zzforge/device_model.hpp"

using namespace zzforge;

namespace {

constexpr double kMHz = kTwoPi * 1e6;
constexpr double kGHz = kTwoPi * 1e9;

TransmonSpec transmon(double w01, double alpha, int levels = 3) {
  TransmonSpec t;
  t.levels = levels;
  t.omega01 = w01;
  t.anharmonicity = alpha;
  return t;
}

CouplingSpec direct(double g1) {
  CouplingSpec c;
  c.topology = Topology::DirectCapacitive;
  c.g1 = g1;
  return c;
}

CouplingSpec cavity(double wc, double h1, double h2, int nmax = 3) {
  CouplingSpec c;
  c.topology = Topology::ResonatorMediated;
  c.cavity_frequency = wc;
  c.h1 = h1;
  c.h2 = h2;
  c.photon_cutoff = nmax;
  return c;
}

DressedTransitions table_one() {
  DressedTransitions t;
  t.t00_10 = 5.07478658 * kGHz;
  t.t00_01 = 5.30990762 * kGHz;
  t.t01_11 = 5.08406906 * kGHz;
  t.t10_11 = 5.31920716 * kGHz;
  t.t10_20 = 4.81503094 * kGHz;
  t.t01_02 = 4.96857665 * kGHz;
  return t;
}

// Energy of the eigenvector with the largest weight on one bare state.
double dressed_energy(const Eigen::SelfAdjointEigenSolver<CMatrix>& es,
                      int bare) {
  Eigen::Index best = 0;
  es.eigenvectors().row(bare).cwiseAbs2().maxCoeff(&best);
  return es.eigenvalues()(best);
}

// Exact ZZ: E11 - E10 - E01 + E00 from brute-force diagonalization.
double exact_zz(const CMatrix& h, int l2, int stride) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  auto e = [&](int j, int a) { return dressed_energy(es, (j * l2 + a) * stride); };
  return e(1, 1) - e(1, 0) - e(0, 1) + e(0, 0);
}

double min_denominator(const TransmonSpec& a, const TransmonSpec& b) {
  double m = 1e300;
  for (int j = 0; j + 1 < a.levels; ++j)
    for (int k = 0; k + 1 < b.levels; ++k)
      m = std::min(m, std::abs(a.energy(j) - a.energy(j + 1) +
                               b.energy(k + 1) - b.energy(k)));
  return m;
}

struct RandomPair {
  TransmonSpec q1, q2;
  double g1;
};

// Random three-level pair with every g_{j,a} / denominator <= ratio.
RandomPair random_perturbative(std::mt19937_64& rng, double ratio) {
  std::uniform_real_distribution<double> w(4.5, 5.5), det(0.15, 0.6),
      alpha(-0.35, -0.2), sign(-1, 1);
  for (;;) {
    const double w1 = w(rng);
    const double w2 = w1 + (sign(rng) < 0 ? -1 : 1) * det(rng);
    RandomPair p{transmon(w1 * kGHz, alpha(rng) * kGHz),
                 transmon(w2 * kGHz, alpha(rng) * kGHz), 0.0};
    const double den = min_denominator(p.q1, p.q2);
    if (den < 0.05 * kGHz) continue;
    p.g1 = ratio * den / 2.0;  // largest ladder element is 2 g1
    return p;
  }
}

}  // namespace

TEST_CASE("capacitive hamiltonian: uncoupled limit is diagonal bare sums") {
  const auto q1 = transmon(5.0 * kGHz, -0.26 * kGHz);
  const auto q2 = transmon(5.3 * kGHz, -0.3 * kGHz);
  const CMatrix h = build_capacitive_hamiltonian(q1, q2, direct(0.0));
  REQUIRE(h.rows() == 9);
  for (int j = 0; j < 3; ++j)
    for (int a = 0; a < 3; ++a)
      CHECK(h(3 * j + a, 3 * j + a).real() ==
            doctest::Approx(q1.energy(j) + q2.energy(a)));
  CHECK((h - CMatrix(h.diagonal().asDiagonal())).norm() == 0.0);
}

TEST_CASE("capacitive hamiltonian: 01-10 element is g00") {
  const auto q1 = transmon(5.0 * kGHz, -0.26 * kGHz);
  const auto q2 = transmon(5.3 * kGHz, -0.3 * kGHz);
  const auto c = direct(20 * kMHz);
  const CMatrix h = build_capacitive_hamiltonian(q1, q2, c);
  CHECK(h(1, 3).real() == doctest::Approx(c.g(0, 0)));
  CHECK(h(3, 1).real() == doctest::Approx(c.g(0, 0)));
}

TEST_CASE("capacitive hamiltonian matches an element loop") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto q1 = transmon((4.5 + u(rng)) * kGHz, -(0.2 + 0.1 * u(rng)) * kGHz);
    const auto q2 = transmon((4.5 + u(rng)) * kGHz, -(0.2 + 0.1 * u(rng)) * kGHz);
    const double g1 = 50 * kMHz * u(rng);
    const CMatrix h = build_capacitive_hamiltonian(q1, q2, direct(g1));
    CMatrix ref = CMatrix::Zero(9, 9);
    for (int j = 0; j < 3; ++j)
      for (int a = 0; a < 3; ++a) {
        const double e1 = j * q1.omega01 + j * (j - 1) / 2.0 * q1.anharmonicity;
        const double e2 = a * q2.omega01 + a * (a - 1) / 2.0 * q2.anharmonicity;
        ref(3 * j + a, 3 * j + a) = e1 + e2;
        if (j + 1 < 3 && a + 1 < 3) {
          const double g = g1 * std::sqrt(j + 1.0) * std::sqrt(a + 1.0);
          ref(3 * j + a + 1, 3 * (j + 1) + a) = g;
          ref(3 * (j + 1) + a, 3 * j + a + 1) = g;
        }
      }
    CHECK((h - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("hamiltonian builders reject the other topology") {
  const auto q = transmon(5.0 * kGHz, -0.26 * kGHz);
  CHECK_THROWS_AS(build_capacitive_hamiltonian(q, q, cavity(6 * kGHz, 0.05 * kGHz, 0.05 * kGHz)),
                  WrongTopology);
  CHECK_THROWS_AS(build_resonator_hamiltonian(q, q, direct(0.01 * kGHz)), WrongTopology);
  CHECK_THROWS_AS(sw_capacitive(q, q, cavity(6 * kGHz, 0.05 * kGHz, 0.05 * kGHz)),
                  WrongTopology);
  CHECK_THROWS_AS(sw_resonator(q, q, direct(0.01 * kGHz)), WrongTopology);
}

TEST_CASE("sw_capacitive: uncoupled limit") {
  const auto p = sw_capacitive(transmon(5.0 * kGHz, -0.26 * kGHz),
                               transmon(5.3 * kGHz, -0.3 * kGHz), direct(0.0));
  CHECK(p.eta == 0.0);
  CHECK(p.lambda_zz == 0.0);
  CHECK(p.gz == 0.0);
  CHECK(p.beta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.omega1 == doctest::Approx(5.0 * kGHz));
  CHECK(p.omega2 == doctest::Approx(5.3 * kGHz));
}

TEST_CASE("sw_capacitive: closed-form coefficients") {
  const double w1 = 5.0 * kGHz, a1 = -0.26 * kGHz;
  const double w2 = 5.6 * kGHz, a2 = -0.2 * kGHz;
  const double g1 = 15 * kMHz;
  const auto p = sw_capacitive(transmon(w1, a1), transmon(w2, a2), direct(g1));
  const double g01 = g1 * std::sqrt(2.0), g10 = g01;
  // Bare ladders: e0 = 0, e1 = w, e2 = 2w + a.
  CHECK(p.beta(0, 0) == doctest::Approx(-g1 / (-w1 + w2)));
  CHECK(p.beta(1, 0) == doctest::Approx(-g10 / (-(w1 + a1) + w2)));
  CHECK(p.beta(0, 1) == doctest::Approx(-g01 / (-w1 + (w2 + a2))));
  CHECK(p.beta(1, 1) == doctest::Approx(-2 * g1 / (-(w1 + a1) + (w2 + a2))));
  const double eta = g1 * g1 / (w2 - w1);
  const double lam = g10 * g10 / (w1 + w2 - (2 * w1 + a1)) +
                     g01 * g01 / (w1 + w2 - (2 * w2 + a2));
  CHECK(p.eta == doctest::Approx(eta));
  CHECK(p.lambda_zz == doctest::Approx(lam));
  CHECK(p.gz == p.lambda_zz);
  CHECK(p.omega1 == doctest::Approx(w1 - eta));
  CHECK(p.omega2 == doctest::Approx(w2 + eta));
}

TEST_CASE("sw_capacitive: guard rejects near resonance") {
  const auto q1 = transmon(5.0 * kGHz, -0.26 * kGHz);
  const auto q2 = transmon(5.02 * kGHz, -0.3 * kGHz);
  CHECK_THROWS_AS(sw_capacitive(q1, q2, direct(10 * kMHz)), NearResonance);
  SwOptions loose;
  loose.guard_factor = 0.5;
  CHECK_NOTHROW(sw_capacitive(q1, q2, direct(10 * kMHz), loose));
}

TEST_CASE("sw_capacitive: ZZ agrees with exact diagonalization") {
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_perturbative(rng, 0.05);
    const auto c = direct(s.g1);
    const auto p = sw_capacitive(s.q1, s.q2, c);
    const double exact = exact_zz(build_capacitive_hamiltonian(s.q1, s.q2, c), 3, 1);
    CAPTURE(trial);
    CHECK(std::abs(p.lambda_zz - exact) <= 0.05 * std::abs(exact));
  }
}

TEST_CASE("sw_capacitive: ZZ scales quadratically with coupling") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = random_perturbative(rng, 0.05);
    const double full = sw_capacitive(s.q1, s.q2, direct(s.g1)).lambda_zz;
    const double half = sw_capacitive(s.q1, s.q2, direct(s.g1 / 2)).lambda_zz;
    CHECK(std::abs(half - full / 4) <= 1e-6 * std::abs(full / 4));
  }
}

TEST_CASE("reduce_resonator: uncoupled limit") {
  const auto q1 = transmon(5.0 * kGHz, -0.26 * kGHz);
  const auto q2 = transmon(5.3 * kGHz, -0.3 * kGHz);
  const auto c = cavity(6.5 * kGHz, 0.0, 0.0);
  const auto r = reduce_resonator(q1, q2, c);
  for (int j = 0; j < 3; ++j) {
    CHECK(r.q1_tilde.energy(j) == doctest::Approx(q1.energy(j)));
    CHECK(r.q2_tilde.energy(j) == doctest::Approx(q2.energy(j)));
  }
  REQUIRE(r.coupling_tilde.g_override.has_value());
  CHECK(r.coupling_tilde.g_override->cwiseAbs().maxCoeff() == 0.0);
  CHECK(sw_resonator(q1, q2, c).lambda_zz == 0.0);
}

TEST_CASE("reduce_resonator: mediated coupling closed form") {
  const double w1 = 5.0 * kGHz, w2 = 5.3 * kGHz, wc = 6.4 * kGHz;
  const double h1 = 60 * kMHz, h2 = 70 * kMHz;
  const auto q1 = transmon(w1, -0.26 * kGHz);
  const auto q2 = transmon(w2, -0.3 * kGHz);
  const auto r = reduce_resonator(q1, q2, cavity(wc, h1, h2));
  const double d1 = w1 - wc, d2 = w2 - wc;
  CHECK((*r.coupling_tilde.g_override)(0, 0) ==
        doctest::Approx(h1 * h2 * (d1 + d2) / (2 * d1 * d2)).epsilon(1e-12));
  CHECK(r.gamma1[0] == doctest::Approx(-h1 / d1));
  CHECK(r.gamma2[0] == doctest::Approx(-h2 / d2));
  CHECK(r.q1_tilde.energy(1) == doctest::Approx(w1 + h1 * h1 / d1));
}

TEST_CASE("sw_resonator equals sw_capacitive on the reduced problem") {
  const auto q1 = transmon(5.0 * kGHz, -0.26 * kGHz);
  const auto q2 = transmon(5.45 * kGHz, -0.3 * kGHz);
  const auto c = cavity(6.4 * kGHz, 60 * kMHz, 70 * kMHz);
  const auto r = reduce_resonator(q1, q2, c);
  const CMatrix via_res = effective_hamiltonian(sw_resonator(q1, q2, c));
  const CMatrix via_cap = effective_hamiltonian(
      sw_capacitive(r.q1_tilde, r.q2_tilde, r.coupling_tilde));
  CHECK((via_res - via_cap).cwiseAbs().maxCoeff() <= 1e-12 * via_cap.cwiseAbs().maxCoeff());
}

TEST_CASE("sw_resonator: reduced coupling scales quadratically") {
  const auto q1 = transmon(5.0 * kGHz, -0.26 * kGHz);
  const auto q2 = transmon(5.45 * kGHz, -0.3 * kGHz);
  auto r = reduce_resonator(q1, q2, cavity(6.4 * kGHz, 60 * kMHz, 70 * kMHz));
  const double full = sw_capacitive(r.q1_tilde, r.q2_tilde, r.coupling_tilde).lambda_zz;
  *r.coupling_tilde.g_override /= 2.0;
  const double half = sw_capacitive(r.q1_tilde, r.q2_tilde, r.coupling_tilde).lambda_zz;
  CHECK(std::abs(half - full / 4) <= 1e-6 * std::abs(full / 4));
}

TEST_CASE("sw_resonator: ZZ agrees with transmon-cavity diagonalization") {
  // Qubits close to each other and far from the cavity: the regime where the
  // exchange picture holds. Two-photon terms dropped by the reduction are the
  // same order as the kept ones, so the error does not shrink with h.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> w(4.8, 5.2), det(0.1, 0.3),
      cav(1.5, 2.5), alpha(-0.35, -0.2), hr(0.03, 0.05);
  for (int trial = 0; trial < 10;) {
    const double w1 = w(rng), w2 = w1 + det(rng), wc = w2 + cav(rng);
    const auto q1 = transmon(w1 * kGHz, alpha(rng) * kGHz);
    const auto q2 = transmon(w2 * kGHz, alpha(rng) * kGHz);
    // Largest cavity element is sqrt(2) h against the smallest detuning.
    const double dmin = (wc - w2) * kGHz;
    const auto c = cavity(wc * kGHz, hr(rng) * dmin / std::sqrt(2.0),
                          hr(rng) * dmin / std::sqrt(2.0), 3);
    EffectiveZZParams p;
    try {
      p = sw_resonator(q1, q2, c);
    } catch (const NearResonance&) {
      continue;  // qubit pair too close to a two-excitation resonance
    }
    const double exact = exact_zz(build_resonator_hamiltonian(q1, q2, c), 3, 4);
    CAPTURE(trial);
    CHECK(std::abs(p.lambda_zz - exact) <= 0.10 * std::abs(exact));
    ++trial;
  }
}

TEST_CASE("sw_resonator: dispersive guard") {
  const auto q1 = transmon(5.0 * kGHz, -0.26 * kGHz);
  const auto q2 = transmon(5.3 * kGHz, -0.3 * kGHz);
  CHECK_THROWS_AS(sw_resonator(q1, q2, cavity(5.05 * kGHz, 20 * kMHz, 20 * kMHz)),
                  NearResonance);
}

TEST_CASE("resonator hamiltonian is Hermitian with the expected size") {
  const auto q1 = transmon(5.0 * kGHz, -0.26 * kGHz);
  const auto q2 = transmon(5.3 * kGHz, -0.3 * kGHz);
  const CMatrix h = build_resonator_hamiltonian(q1, q2, cavity(6.4 * kGHz, 60 * kMHz, 70 * kMHz, 3));
  CHECK(h.rows() == 36);
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * h.cwiseAbs().maxCoeff());
  // |j=1, a=0, n=0> couples to |0, 0, 1> with h1.
  CHECK(std::abs(h((1 * 3 + 0) * 4 + 0, 1)) == doctest::Approx(60 * kMHz));
}

TEST_CASE("effective_hamiltonian: uncoupled and ZZ identities") {
  EffectiveZZParams p;
  p.omega1 = 5.0 * kGHz;
  p.omega2 = 5.3 * kGHz;
  const CMatrix h0 = effective_hamiltonian(p);
  CHECK((h0 - CMatrix(h0.diagonal().asDiagonal())).norm() == 0.0);
  CHECK((h0(2, 2) - h0(0, 0)).real() == doctest::Approx(p.omega1));
  CHECK((h0(1, 1) - h0(0, 0)).real() == doctest::Approx(p.omega2));
  CHECK((h0(3, 3) - h0(0, 0)).real() == doctest::Approx(p.omega1 + p.omega2));

  p.gz = 9.29 * kMHz;
  const CMatrix h = effective_hamiltonian(p);
  const double zz = (h(3, 3) - h(2, 2) - h(1, 1) + h(0, 0)).real();
  CHECK(zz == doctest::Approx(p.gz).epsilon(1e-9));
  CHECK((h(2, 2) - h(0, 0)).real() == doctest::Approx(p.omega1));
}

TEST_CASE("measured spectrum: ZZ branches") {
  const auto t = table_one();
  TransitionTable table;
  table.t00_10 = t.t00_10;
  table.t00_01 = t.t00_01;
  table.t01_11 = t.t01_11;
  table.t10_11 = t.t10_11;
  CHECK(table.zz_branch_qubit1() / kMHz == doctest::Approx(9.28248).epsilon(1e-6));
  CHECK(table.zz_branch_qubit2() / kMHz == doctest::Approx(9.29954).epsilon(1e-6));

  EffectiveZZParams dressing;
  dressing.beta = RMatrix::Zero(2, 2);
  const auto p = effective_params_from_spectrum(table, dressing);
  CHECK(p.gz / kMHz == doctest::Approx(9.29101).epsilon(1e-5));
  CHECK(std::abs(p.gz / kMHz - 9.29) < 0.01);
  const CMatrix h = effective_hamiltonian(p);
  CHECK((h(2, 2) - h(0, 0)).real() == doctest::Approx(t.t00_10));
  CHECK((h(1, 1) - h(0, 0)).real() == doctest::Approx(t.t00_01));
}

TEST_CASE("dressed_spectrum: uncoupled transitions equal bare differences") {
  const auto q1 = transmon(5.0 * kGHz, -0.26 * kGHz);
  const auto q2 = transmon(5.3 * kGHz, -0.3 * kGHz);
  const std::array<int, 2> dims{3, 3};
  const auto t = dressed_spectrum(build_capacitive_hamiltonian(q1, q2, direct(0.0)), dims);
  CHECK(t.t00_10 == doctest::Approx(q1.omega01).epsilon(1e-14));
  CHECK(t.t00_01 == doctest::Approx(q2.omega01).epsilon(1e-14));
  CHECK(t.t01_11 == doctest::Approx(q1.omega01).epsilon(1e-14));
  CHECK(t.t10_11 == doctest::Approx(q2.omega01).epsilon(1e-14));
  CHECK(t.t10_20 == doctest::Approx(q1.omega01 + q1.anharmonicity).epsilon(1e-14));
  CHECK(t.t01_02 == doctest::Approx(q2.omega01 + q2.anharmonicity).epsilon(1e-14));
  CHECK(t.zz_branch_qubit1() == doctest::Approx(0.0));
}

TEST_CASE("dressed_spectrum agrees with the perturbative frequencies") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = random_perturbative(rng, 0.05);
    const auto c = direct(s.g1);
    const auto p = sw_capacitive(s.q1, s.q2, c);
    const std::array<int, 2> dims{3, 3};
    const auto t = dressed_spectrum(build_capacitive_hamiltonian(s.q1, s.q2, c), dims);
    const double ratio = 2 * s.g1 / min_denominator(s.q1, s.q2);
    const double bound = 2 * ratio * ratio * 2 * s.g1;
    CAPTURE(trial);
    CHECK(std::abs(t.t00_10 - p.omega1) <= bound);
    CHECK(std::abs(t.t00_01 - p.omega2) <= bound);
  }
}

TEST_CASE("dressed_spectrum: degenerate ladders are ambiguous") {
  TransmonSpec q;
  q.levels = 3;
  q.omega01 = 5.0 * kGHz;
  q.energy_override = {0.0, 5.0 * kGHz, 10.0 * kGHz};
  const std::array<int, 2> dims{3, 3};
  CHECK_THROWS_AS(dressed_spectrum(build_capacitive_hamiltonian(q, q, direct(50 * kMHz)), dims),
                  AmbiguousLabel);
}

TEST_CASE("calibration reproduces the measured spectrum") {
  const auto target = table_one();
  const auto cal = calibrate_capacitive(target, 3);
  const double tol = 0.02 * kMHz;
  CHECK(std::abs(cal.fitted.t00_10 - target.t00_10) < tol);
  CHECK(std::abs(cal.fitted.t00_01 - target.t00_01) < tol);
  CHECK(std::abs(cal.fitted.t01_11 - target.t01_11) < tol);
  CHECK(std::abs(cal.fitted.t10_11 - target.t10_11) < tol);
  CHECK(std::abs(cal.fitted.t10_20 - target.t10_20) < tol);
  CHECK(std::abs(cal.fitted.t01_02 - target.t01_02) < tol);
  CHECK(cal.rms_residual < 0.01 * kMHz);

  // Dressed anharmonicity of qubit 1 read off the fitted spectrum.
  const double alpha1 = (cal.fitted.t10_20 - cal.fitted.t00_10) / kMHz;
  CHECK(alpha1 == doctest::Approx(-259.76).epsilon(1e-4));
  CHECK(std::abs(alpha1 + 260) < 1.0);

  // Second-order ZZ of the fitted bare model lands near the measured value.
  const auto p = sw_capacitive(cal.q1, cal.q2, cal.coupling, SwOptions{3.0});
  CHECK(std::abs(p.lambda_zz / kMHz - 9.29) < 1.0);
  CHECK(std::abs(cal.fitted.zz_branch_qubit1() / kMHz - 9.28248) < 0.02);
}

TEST_CASE("logical drive matrix") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 10; ++trial) {
    EffectiveZZParams p;
    p.omega1 = 5.0 * kGHz;
    p.omega2 = 5.3 * kGHz;
    p.gz = 9.29 * kMHz;
    p.eta = 0.7 * kMHz;
    p.lambda_zz = p.gz;
    p.level1 = {0.0, 5.0 * kGHz};
    p.level2 = {0.0, 5.3 * kGHz};
    p.beta = RMatrix(2, 2);
    p.beta << 0.05 * n(rng), 0.05 * n(rng), 0.05 * n(rng), 0.05 * n(rng);
    Dipoles d;
    d.d1 = {1.0 + 0.1 * n(rng), 1.4 + 0.1 * n(rng)};
    d.d2 = {1.0 + 0.1 * n(rng), 1.4 + 0.1 * n(rng)};
    const Complex o1(n(rng) * kMHz, n(rng) * kMHz), o2(n(rng) * kMHz, n(rng) * kMHz);
    const CMatrix h = logical_drive_hamiltonian(p, o1, o2, d);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * h.cwiseAbs().maxCoeff());
    const Complex e13 = d.d1[0] * o1 + (d.d2[1] * p.beta(0, 1) - d.d2[0] * p.beta(0, 0)) * o2;
    CHECK(std::abs(h(1, 3) - e13) <= 1e-9 * std::abs(e13));
    const Complex e01 = d.d2[0] * o2 - d.d1[0] * p.beta(0, 0) * o1;
    CHECK(std::abs(h(0, 1) - e01) <= 1e-9 * std::abs(e01));
    const Complex e23 = (d.d1[0] * p.beta(0, 0) - d.d1[1] * p.beta(1, 0)) * o1 + d.d2[0] * o2;
    CHECK(std::abs(h(2, 3) - e23) <= 1e-9 * std::abs(e23));
  }
}

TEST_CASE("logical drive matrix: limits") {
  EffectiveZZParams p;
  p.omega1 = 5.0 * kGHz;
  p.omega2 = 5.3 * kGHz;
  p.gz = 9.29 * kMHz;
  p.lambda_zz = p.gz;
  p.level1 = {0.0, 5.0 * kGHz};
  p.level2 = {0.0, 5.3 * kGHz};
  p.beta = RMatrix::Zero(2, 2);
  const Dipoles d = Dipoles::harmonic(3);

  const CMatrix h0 = logical_drive_hamiltonian(p, 0.0, 0.0, d);
  CHECK((h0 - CMatrix(h0.diagonal().asDiagonal())).norm() == 0.0);
  const CMatrix ref = effective_hamiltonian(p);
  for (int k = 1; k < 4; ++k)
    CHECK((h0(k, k) - h0(0, 0)).real() ==
          doctest::Approx((ref(k, k) - ref(0, 0)).real()).epsilon(1e-9));

  const Complex o1(3 * kMHz, 1 * kMHz), o2(-2 * kMHz, 0.5 * kMHz);
  const CMatrix h = logical_drive_hamiltonian(p, o1, o2, d);
  CHECK(std::abs(h(0, 2) - o1) < 1e-6);
  CHECK(std::abs(h(1, 3) - o1) < 1e-6);
  CHECK(std::abs(h(0, 1) - o2) < 1e-6);
  CHECK(std::abs(h(2, 3) - o2) < 1e-6);
  CHECK(std::abs(h(0, 3)) < 1e-9);
  CHECK(std::abs(h(1, 2)) < 1e-9);
}

TEST_CASE("decoherence spec") {
  DecoherenceSpec d;
  d.t1 = {76.98e-6, 79.71e-6};
  d.t2star = {50.65e-6, 17.09e-6};
  CHECK_NOTHROW(d.validate());
  CHECK(d.dephasing_rate(0) == doctest::Approx(1 / 50.65e-6 - 1 / (2 * 76.98e-6)));
  CHECK(d.dephasing_rate(1) > 0.0);
  d.t2star[1] = 2.1 * d.t1[1];
  CHECK_THROWS_AS(d.validate(), ValidationError);
  d.t2star[1] = 2.0 * d.t1[1];
  CHECK_NOTHROW(d.validate());
  CHECK(d.dephasing_rate(1) == doctest::Approx(0.0));
}
