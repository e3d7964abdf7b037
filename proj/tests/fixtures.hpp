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

// Shared device fixtures: the measured two-qubit spectrum, its calibrated
// bare model and the measured coherence times.

#include "zzforge/dynamics.hpp"

namespace zzforge::testing {

inline constexpr double kMHz = kTwoPi * 1e6;
inline constexpr double kGHz = kTwoPi * 1e9;

inline DressedTransitions measured_spectrum() {
  DressedTransitions t;
  t.t00_10 = 5.07478658 * kGHz;
  t.t00_01 = 5.30990762 * kGHz;
  t.t01_11 = 5.08406906 * kGHz;
  t.t10_11 = 5.31920716 * kGHz;
  t.t10_20 = 4.81503094 * kGHz;
  t.t01_02 = 4.96857665 * kGHz;
  return t;
}

inline SimulationModel calibrated_device() {
  const CalibrationResult cal = calibrate_capacitive(measured_spectrum(), 3);
  const EffectiveZZParams dressing =
      sw_capacitive(cal.q1, cal.q2, cal.coupling, SwOptions{3.0});
  SimulationModel m;
  m.params = effective_params_from_spectrum(cal.fitted, dressing);
  m.bare = BareDevice{cal.q1, cal.q2, cal.coupling};
  return m;
}

inline const SimulationModel& table_device() {
  static const SimulationModel m = calibrated_device();
  return m;
}

inline DecoherenceSpec measured_coherence() {
  DecoherenceSpec d;
  d.t1 = {76.98e-6, 79.71e-6};
  d.t2star = {50.65e-6, 17.09e-6};
  return d;
}

}  // namespace zzforge::testing
