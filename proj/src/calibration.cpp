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

#include <cmath>

#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/NumericalDiff>

#include "zzforge/device_model.hpp"

namespace zzforge {

namespace {

constexpr double kGHz = kTwoPi * 1e9;

struct Model {
  int levels;
  TransmonSpec q1, q2;
  CouplingSpec c;

  // x = (w1, a1, w2, a2, g1) in GHz.
  void load(const Eigen::VectorXd& x) {
    q1.levels = q2.levels = levels;
    q1.omega01 = x(0) * kGHz;
    q1.anharmonicity = x(1) * kGHz;
    q2.omega01 = x(2) * kGHz;
    q2.anharmonicity = x(3) * kGHz;
    c.topology = Topology::DirectCapacitive;
    c.g1 = std::abs(x(4)) * kGHz;
  }

  TransitionTable spectrum() const {
    const int dims[2] = {levels, levels};
    return dressed_spectrum(build_capacitive_hamiltonian(q1, q2, c), dims);
  }
};

struct Residual : Eigen::DenseFunctor<double> {
  Residual(int levels, const DressedTransitions& t)
      : Eigen::DenseFunctor<double>(5, 6), levels(levels), target(t) {}

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    Model m{levels, {}, {}, {}};
    m.load(x);
    TransitionTable s;
    try {
      s = m.spectrum();
    } catch (const AmbiguousLabel&) {
      return -1;
    }
    f(0) = (s.t00_10 - target.t00_10) / kGHz;
    f(1) = (s.t00_01 - target.t00_01) / kGHz;
    f(2) = (s.t01_11 - target.t01_11) / kGHz;
    f(3) = (s.t10_11 - target.t10_11) / kGHz;
    f(4) = (s.t10_20 - target.t10_20) / kGHz;
    f(5) = (s.t01_02 - target.t01_02) / kGHz;
    return 0;
  }

  int levels;
  DressedTransitions target;
};

}  // namespace

CalibrationResult calibrate_capacitive(const DressedTransitions& target,
                                       int levels) {
  if (levels < 3 || levels > 5)
    throw Unsupported("calibration needs 3 to 5 levels per transmon");

  // Start from the undressed reading of the spectrum and a ZZ-sized coupling
  // estimated from the two-level dispersive formula.
  Eigen::VectorXd x(5);
  x(0) = target.t00_10 / kGHz;
  x(1) = (target.t10_20 - target.t00_10) / kGHz;
  x(2) = target.t00_01 / kGHz;
  x(3) = (target.t01_02 - target.t00_01) / kGHz;
  {
    const double zz = 0.5 * ((target.t01_11 - target.t00_10) +
                             (target.t10_11 - target.t00_01)) / kGHz;
    const double delta = x(0) - x(2);
    // zz ~ 2 g^2 (1/(delta + a1) - 1/(delta - a2))
    const double k = 2.0 * (1.0 / (delta + x(1)) - 1.0 / (delta - x(3)));
    x(4) = (k != 0.0 && zz / k > 0.0) ? std::sqrt(zz / k) : 0.01;
  }

  Residual functor(levels, target);
  Eigen::NumericalDiff<Residual> numdiff(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Residual>> lm(numdiff);
  lm.setXtol(1e-14);
  lm.setFtol(1e-14);
  lm.setMaxfev(4000);
  const auto status = lm.minimize(x);
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters)
    throw NotConverged("calibration: improper input");

  Model m{levels, {}, {}, {}};
  m.load(x);
  CalibrationResult r;
  r.q1 = m.q1;
  r.q2 = m.q2;
  r.coupling = m.c;
  r.fitted = m.spectrum();
  Eigen::VectorXd f(6);
  functor(x, f);
  r.rms_residual = std::sqrt(f.squaredNorm() / 6.0) * kGHz;
  return r;
}

}  // namespace zzforge
