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


#include "zzforge/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace zzforge {

namespace {

using nlohmann::json;

struct Unit {
  const char* name;
  double scale;
};

constexpr Unit kFrequencyUnits[] = {
    {"GHz", 1e9}, {"MHz", 1e6}, {"kHz", 1e3}, {"Hz", 1.0}};
constexpr Unit kTimeUnits[] = {{"s", 1.0},   {"ms", 1e-3}, {"us", 1e-6},
                               {"\xC2\xB5s", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}};

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object())
    throw ParseError("config: '" + path + "' must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* a) { return k == a; }))
      throw ParseError("config: unknown key '" + join(path, k) + "'");
  }
}

const json* child(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& need(const json& obj, const std::string& path, const char* key) {
  const json* v = child(obj, key);
  if (!v) throw ParseError("config: missing key '" + join(path, key) + "'");
  return *v;
}

double quantity(const json& v, const std::string& key, bool frequency) {
  if (!v.is_string())
    throw ParseError("config: '" + key +
                     "' must be a string with a unit suffix");
  return parse_quantity(v.get<std::string>(), key, frequency);
}

bool boolean(const json& v, const std::string& key) {
  if (!v.is_boolean())
    throw ParseError("config: '" + key + "' must be true or false");
  return v.get<bool>();
}

long integer(const json& v, const std::string& key) {
  if (!v.is_number_integer())
    throw ParseError("config: '" + key + "' must be an integer");
  return v.get<long>();
}

double number(const json& v, const std::string& key) {
  if (!v.is_number())
    throw ParseError("config: '" + key + "' must be a number");
  return v.get<double>();
}

std::string string(const json& v, const std::string& key) {
  if (!v.is_string())
    throw ParseError("config: '" + key + "' must be a string");
  return v.get<std::string>();
}

std::string shortest(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

const char* kTransitionKeys[] = {"00-10", "00-01", "01-11",
                                 "10-11", "10-20", "01-02"};

double* transition_slot(TransitionSection& t, int k) {
  double* slots[] = {&t.t00_10, &t.t00_01, &t.t01_11,
                     &t.t10_11, &t.t10_20, &t.t01_02};
  return slots[k];
}

QubitBare parse_qubit(const json& j, const std::string& path) {
  check_keys(j, path, {"omega01", "anharmonicity"});
  QubitBare q;
  q.omega01_hz = quantity(need(j, path, "omega01"), join(path, "omega01"), true);
  q.anharmonicity_hz =
      quantity(need(j, path, "anharmonicity"), join(path, "anharmonicity"), true);
  return q;
}

DeviceSection parse_device(const json& j) {
  const std::string path = "device";
  check_keys(j, path, {"topology", "levels", "guard_factor", "transitions",
                       "calibrate", "bare"});
  DeviceSection d;
  if (auto* v = child(j, "topology")) {
    const std::string t = string(*v, "device.topology");
    if (t == "capacitive")
      d.topology = Topology::DirectCapacitive;
    else if (t == "resonator")
      d.topology = Topology::ResonatorMediated;
    else
      throw ParseError("config: device.topology must be 'capacitive' or "
                       "'resonator', got '" + t + "'");
  }
  if (auto* v = child(j, "levels")) d.levels = static_cast<int>(integer(*v, "device.levels"));
  if (auto* v = child(j, "guard_factor")) d.guard_factor = number(*v, "device.guard_factor");
  if (auto* v = child(j, "calibrate")) d.calibrate = boolean(*v, "device.calibrate");
  if (auto* v = child(j, "transitions")) {
    const std::string tp = "device.transitions";
    if (!v->is_object()) throw ParseError("config: '" + tp + "' must be an object");
    for (const auto& [k, val] : v->items())
      if (std::none_of(std::begin(kTransitionKeys), std::end(kTransitionKeys),
                       [&](const char* a) { return k == a; }))
        throw ParseError("config: unknown key '" + join(tp, k) + "'");
    TransitionSection t;
    for (int k = 0; k < 6; ++k)
      *transition_slot(t, k) = quantity(need(*v, tp, kTransitionKeys[k]),
                                        join(tp, kTransitionKeys[k]), true);
    d.transitions = t;
  }
  if (auto* v = child(j, "bare")) {
    const std::string bp = "device.bare";
    check_keys(*v, bp, {"qubit1", "qubit2", "g1", "cavity", "h1", "h2",
                        "photon_cutoff"});
    BareSection b;
    b.q1 = parse_qubit(need(*v, bp, "qubit1"), bp + ".qubit1");
    b.q2 = parse_qubit(need(*v, bp, "qubit2"), bp + ".qubit2");
    if (auto* g = child(*v, "g1")) b.g1_hz = quantity(*g, bp + ".g1", true);
    if (auto* g = child(*v, "cavity")) b.cavity_hz = quantity(*g, bp + ".cavity", true);
    if (auto* g = child(*v, "h1")) b.h1_hz = quantity(*g, bp + ".h1", true);
    if (auto* g = child(*v, "h2")) b.h2_hz = quantity(*g, bp + ".h2", true);
    if (auto* g = child(*v, "photon_cutoff"))
      b.photon_cutoff = static_cast<int>(integer(*g, bp + ".photon_cutoff"));
    d.bare = b;
  }
  return d;
}

CoherenceSection parse_coherence(const json& j) {
  check_keys(j, "coherence", {"enabled", "qubit1", "qubit2"});
  CoherenceSection c;
  if (auto* v = child(j, "enabled")) c.enabled = boolean(*v, "coherence.enabled");
  for (int q = 0; q < 2; ++q) {
    const std::string p = q == 0 ? "coherence.qubit1" : "coherence.qubit2";
    const json& qj = need(j, "coherence", q == 0 ? "qubit1" : "qubit2");
    check_keys(qj, p, {"T1", "T2star"});
    c.t1_s[q] = quantity(need(qj, p, "T1"), p + ".T1", false);
    c.t2star_s[q] = quantity(need(qj, p, "T2star"), p + ".T2star", false);
  }
  return c;
}

SimulationSection parse_simulation(const json& j) {
  const std::string p = "simulation";
  check_keys(j, p, {"model", "max_dt", "rwa", "check_convergence", "tolerance",
                    "tag_period", "swipht_samples"});
  SimulationSection s;
  if (auto* v = child(j, "model")) {
    try {
      s.model = model_from_string(string(*v, "simulation.model"));
    } catch (const ValidationError& e) {
      throw ParseError(std::string("config: simulation.model: ") + e.what());
    }
  }
  if (auto* v = child(j, "max_dt")) s.max_dt_s = quantity(*v, "simulation.max_dt", false);
  if (auto* v = child(j, "rwa")) s.rwa = boolean(*v, "simulation.rwa");
  if (auto* v = child(j, "check_convergence"))
    s.check_convergence = boolean(*v, "simulation.check_convergence");
  if (auto* v = child(j, "tolerance")) s.tolerance = number(*v, "simulation.tolerance");
  if (auto* v = child(j, "tag_period"))
    s.tag_period_s = quantity(*v, "simulation.tag_period", false);
  if (auto* v = child(j, "swipht_samples"))
    s.swipht_samples = static_cast<int>(integer(*v, "simulation.swipht_samples"));
  return s;
}

ExperimentSection parse_experiment(const json& j) {
  const std::string p = "experiment";
  check_keys(j, p, {"seed", "shots", "rb", "perfect_prep"});
  ExperimentSection e;
  if (auto* v = child(j, "seed")) {
    if (!v->is_number_unsigned())
      throw ParseError("config: 'experiment.seed' must be a non-negative integer");
    e.seed = v->get<std::uint64_t>();
  }
  if (auto* v = child(j, "shots")) e.shots = integer(*v, "experiment.shots");
  if (auto* v = child(j, "perfect_prep"))
    e.perfect_prep = boolean(*v, "experiment.perfect_prep");
  if (auto* v = child(j, "rb")) {
    check_keys(*v, "experiment.rb",
               {"pi2_sequences", "pi_sequences", "max_pairs", "stride"});
    auto get = [&](const char* k, int& slot) {
      if (auto* x = child(*v, k))
        slot = static_cast<int>(integer(*x, std::string("experiment.rb.") + k));
    };
    get("pi2_sequences", e.rb_pi2_sequences);
    get("pi_sequences", e.rb_pi_sequences);
    get("max_pairs", e.rb_max_pairs);
    get("stride", e.rb_stride);
  }
  return e;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + std::count(text.begin(), text.begin() + byte, '\n');
}

}  // namespace

double parse_quantity(const std::string& text, const std::string& key,
                      bool frequency) {
  const char* b = text.data();
  const char* e = b + text.size();
  while (b < e && *b == ' ') ++b;
  double value = 0.0;
  auto r = std::from_chars(b, e, value);
  if (r.ec != std::errc())
    throw ParseError("config: '" + key + "': cannot read a number from '" +
                     text + "'");
  const char* u = r.ptr;
  while (u < e && *u == ' ') ++u;
  const std::string unit(u, e);
  if (frequency) {
    for (const auto& x : kFrequencyUnits)
      if (unit == x.name) return value * x.scale;
    throw ParseError("config: '" + key + "': expected a frequency unit "
                     "(GHz, MHz, kHz, Hz), got '" + unit + "'");
  }
  for (const auto& x : kTimeUnits)
    if (unit == x.name) return value * x.scale;
  throw ParseError("config: '" + key + "': expected a time unit "
                   "(s, ms, us, ns, ps), got '" + unit + "'");
}

std::string format_hz(double hz) { return shortest(hz) + " Hz"; }
std::string format_seconds(double s) { return shortest(s) + " s"; }

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ":" + std::to_string(line_of(text, e.byte)) +
                     ": " + e.what());
  }
  check_keys(j, "", {"device", "coherence", "simulation", "experiment",
                     "output_dir"});
  RunConfig c;
  c.device = parse_device(need(j, "", "device"));
  c.coherence = parse_coherence(need(j, "", "coherence"));
  if (auto* v = child(j, "simulation")) c.simulation = parse_simulation(*v);
  if (auto* v = child(j, "experiment")) c.experiment = parse_experiment(*v);
  if (auto* v = child(j, "output_dir")) c.output_dir = string(*v, "output_dir");
  validate(c);
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

void validate(const RunConfig& c) {
  std::vector<std::string> v;
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) v.push_back(msg);
  };
  const auto& d = c.device;
  require(d.levels >= 3 && d.levels <= 5, "device.levels must be 3..5");
  require(d.guard_factor > 0, "device.guard_factor must be positive");
  require(d.transitions.has_value() != d.bare.has_value(),
          "device: exactly one of 'transitions' and 'bare' is required");
  if (d.transitions) {
    TransitionSection t = *d.transitions;
    for (int k = 0; k < 6; ++k)
      require(*transition_slot(t, k) > 0,
              std::string("device.transitions.") + kTransitionKeys[k] +
                  " must be positive");
    require(!d.calibrate || d.topology == Topology::DirectCapacitive,
            "device: calibration supports the capacitive topology only");
  }
  if (d.bare) {
    const auto& b = *d.bare;
    require(b.q1.omega01_hz > 0 && b.q2.omega01_hz > 0,
            "device.bare: omega01 must be positive");
    if (d.topology == Topology::DirectCapacitive) {
      require(b.g1_hz > 0, "device.bare.g1 must be positive");
    } else {
      require(b.cavity_hz > 0, "device.bare.cavity must be positive");
      require(b.h1_hz > 0 && b.h2_hz > 0, "device.bare.h1/h2 must be positive");
      require(b.photon_cutoff >= 1, "device.bare.photon_cutoff must be >= 1");
    }
  }
  for (int q = 0; q < 2; ++q) {
    const std::string p = "coherence.qubit" + std::to_string(q + 1);
    const double t1 = c.coherence.t1_s[q], t2 = c.coherence.t2star_s[q];
    require(t1 > 0, p + ".T1 must be positive");
    require(t2 > 0, p + ".T2star must be positive");
    require(t2 <= 2 * t1, p + ".T2star exceeds 2*T1");
  }
  const auto& s = c.simulation;
  require(s.max_dt_s > 0, "simulation.max_dt must be positive");
  require(s.tolerance > 0, "simulation.tolerance must be positive");
  require(s.tag_period_s > 0, "simulation.tag_period must be positive");
  require(s.swipht_samples >= 512, "simulation.swipht_samples must be >= 512");
  require(s.rwa || s.model == ModelKind::ThreeLevel,
          "simulation.rwa = false requires the threelevel model");
  const auto& e = c.experiment;
  require(e.shots >= 1, "experiment.shots must be >= 1");
  require(e.rb_pi2_sequences >= 1 && e.rb_pi_sequences >= 1,
          "experiment.rb sequence counts must be >= 1");
  require(e.rb_stride >= 1, "experiment.rb.stride must be >= 1");
  require(e.rb_max_pairs >= e.rb_stride,
          "experiment.rb.max_pairs must be >= stride");
  require(!c.output_dir.empty(), "output_dir must not be empty");
  if (!v.empty()) {
    std::string msg = "config: " + std::to_string(v.size()) + " violation(s):";
    for (const auto& x : v) msg += "\n  - " + x;
    throw ValidationError(msg);
  }
}

std::string emit_config(const RunConfig& c) {
  json dev = json::object();
  dev["topology"] = c.device.topology == Topology::DirectCapacitive
                        ? "capacitive"
                        : "resonator";
  dev["levels"] = c.device.levels;
  dev["guard_factor"] = c.device.guard_factor;
  dev["calibrate"] = c.device.calibrate;
  if (c.device.transitions) {
    TransitionSection t = *c.device.transitions;
    json tj = json::object();
    for (int k = 0; k < 6; ++k)
      tj[kTransitionKeys[k]] = format_hz(*transition_slot(t, k));
    dev["transitions"] = tj;
  }
  if (c.device.bare) {
    const auto& b = *c.device.bare;
    auto qubit = [](const QubitBare& q) {
      return json{{"omega01", format_hz(q.omega01_hz)},
                  {"anharmonicity", format_hz(q.anharmonicity_hz)}};
    };
    dev["bare"] = json{{"qubit1", qubit(b.q1)},
                       {"qubit2", qubit(b.q2)},
                       {"g1", format_hz(b.g1_hz)},
                       {"cavity", format_hz(b.cavity_hz)},
                       {"h1", format_hz(b.h1_hz)},
                       {"h2", format_hz(b.h2_hz)},
                       {"photon_cutoff", b.photon_cutoff}};
  }
  json coh = json::object();
  coh["enabled"] = c.coherence.enabled;
  for (int q = 0; q < 2; ++q)
    coh[q == 0 ? "qubit1" : "qubit2"] =
        json{{"T1", format_seconds(c.coherence.t1_s[q])},
             {"T2star", format_seconds(c.coherence.t2star_s[q])}};
  const auto& s = c.simulation;
  json sim{{"model", to_string(s.model)},
           {"max_dt", format_seconds(s.max_dt_s)},
           {"rwa", s.rwa},
           {"check_convergence", s.check_convergence},
           {"tolerance", s.tolerance},
           {"tag_period", format_seconds(s.tag_period_s)},
           {"swipht_samples", s.swipht_samples}};
  const auto& e = c.experiment;
  json exp{{"shots", e.shots},
           {"perfect_prep", e.perfect_prep},
           {"rb", json{{"pi2_sequences", e.rb_pi2_sequences},
                       {"pi_sequences", e.rb_pi_sequences},
                       {"max_pairs", e.rb_max_pairs},
                       {"stride", e.rb_stride}}}};
  if (e.seed) exp["seed"] = *e.seed;
  json root{{"device", dev},
            {"coherence", coh},
            {"simulation", sim},
            {"experiment", exp},
            {"output_dir", c.output_dir}};
  return root.dump(2) + "\n";
}

std::string config_hash(const RunConfig& c) {
  const std::string text = emit_config(c);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

DerivedDevice derive_device(const RunConfig& c) {
  const auto& d = c.device;
  const SwOptions sw{d.guard_factor};
  DerivedDevice out;
  out.model.dipoles = Dipoles::harmonic(d.levels);
  if (d.transitions) {
    const auto& t = *d.transitions;
    DressedTransitions target{kTwoPi * t.t00_10, kTwoPi * t.t00_01,
                              kTwoPi * t.t01_11, kTwoPi * t.t10_11,
                              kTwoPi * t.t10_20, kTwoPi * t.t01_02};
    if (d.calibrate) {
      CalibrationResult cal = calibrate_capacitive(target, d.levels);
      const EffectiveZZParams dressing =
          sw_capacitive(cal.q1, cal.q2, cal.coupling, sw);
      out.spectrum = cal.fitted;
      out.model.params = effective_params_from_spectrum(cal.fitted, dressing);
      out.model.bare = BareDevice{cal.q1, cal.q2, cal.coupling};
      out.calibration = std::move(cal);
    } else {
      TransitionTable table;
      table.t00_10 = target.t00_10;
      table.t00_01 = target.t00_01;
      table.t01_11 = target.t01_11;
      table.t10_11 = target.t10_11;
      table.t10_20 = target.t10_20;
      table.t01_02 = target.t01_02;
      EffectiveZZParams undressed;
      undressed.beta = RMatrix::Zero(d.levels, d.levels);
      out.spectrum = table;
      out.model.params = effective_params_from_spectrum(table, undressed);
    }
    return out;
  }
  const auto& b = *d.bare;
  TransmonSpec q1{d.levels, kTwoPi * b.q1.omega01_hz,
                  kTwoPi * b.q1.anharmonicity_hz, {}};
  TransmonSpec q2{d.levels, kTwoPi * b.q2.omega01_hz,
                  kTwoPi * b.q2.anharmonicity_hz, {}};
  CouplingSpec cs;
  cs.topology = d.topology;
  if (d.topology == Topology::DirectCapacitive) {
    cs.g1 = kTwoPi * b.g1_hz;
    const CMatrix h = build_capacitive_hamiltonian(q1, q2, cs);
    const int dims[] = {d.levels, d.levels};
    out.spectrum = dressed_spectrum(h, dims);
    out.model.params =
        effective_params_from_spectrum(out.spectrum, sw_capacitive(q1, q2, cs, sw));
    out.model.bare = BareDevice{q1, q2, cs};
  } else {
    cs.cavity_frequency = kTwoPi * b.cavity_hz;
    cs.h1 = kTwoPi * b.h1_hz;
    cs.h2 = kTwoPi * b.h2_hz;
    cs.photon_cutoff = b.photon_cutoff;
    const CMatrix h = build_resonator_hamiltonian(q1, q2, cs);
    const int dims[] = {d.levels, d.levels, b.photon_cutoff + 1};
    out.spectrum = dressed_spectrum(h, dims);
    out.model.params =
        effective_params_from_spectrum(out.spectrum, sw_resonator(q1, q2, cs, sw));
  }
  return out;
}

std::optional<DecoherenceSpec> decoherence_of(const RunConfig& c) {
  if (!c.coherence.enabled) return std::nullopt;
  DecoherenceSpec s;
  s.t1 = c.coherence.t1_s;
  s.t2star = c.coherence.t2star_s;
  return s;
}

SimulationOptions simulation_options(const RunConfig& c) {
  SimulationOptions o;
  o.model = c.simulation.model;
  o.decoherence = decoherence_of(c);
  o.max_dt = c.simulation.max_dt_s;
  o.check_convergence = c.simulation.check_convergence;
  o.tolerance = c.simulation.tolerance;
  o.counter_rotating = !c.simulation.rwa;
  return o;
}

}  // namespace zzforge
