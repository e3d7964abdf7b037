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

#include "zzforge/experiments.hpp"

#include <cmath>
#include <cstdio>

#include "zzforge/parallel.hpp"

namespace zzforge {

// ShotSampler

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string key_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::uint64_t ShotSampler::stream_seed(std::uint64_t index) const {
  return splitmix64(splitmix64(master_) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::mt19937_64 ShotSampler::stream(std::uint64_t index) const {
  return std::mt19937_64(stream_seed(index));
}

std::vector<long> ShotSampler::multinomial(const std::vector<double>& probs,
                                           long shots, std::mt19937_64& rng) {
  std::vector<long> out(probs.size(), 0);
  if (probs.empty()) return out;
  double mass = 0.0;
  for (double p : probs) mass += std::max(0.0, p);
  long left = shots;
  for (std::size_t k = 0; k + 1 < probs.size() && left > 0; ++k) {
    const double pk = std::max(0.0, probs[k]);
    const double q = mass > 0.0 ? std::clamp(pk / mass, 0.0, 1.0) : 0.0;
    long draw = 0;
    if (q >= 1.0) {
      draw = left;
    } else if (q > 0.0) {
      std::binomial_distribution<long> bin(left, q);
      draw = bin(rng);
    }
    out[k] = draw;
    left -= draw;
    mass -= pk;
  }
  out.back() += left;
  return out;
}

// Gates

CMatrix ideal_rotation(char axis, double angle) {
  switch (axis) {
    case 'x': return rotation_x(angle);
    case 'y': return rotation_y(angle);
    case 'z': return rotation_z(angle);
    case '0': return pauli_i();
    default: throw ValidationError(std::string("unknown rotation axis '") + axis + "'");
  }
}

CMatrix ideal_gate(const TagGate& g) {
  return on_qubit(ideal_rotation(g.axis, g.angle), g.qubit);
}

GateSet::GateSet(ExperimentContext ctx) : ctx_(std::move(ctx)) {
  ctx_.sim.model = ModelKind::Logical4;
  if (ctx_.sim.decoherence) ctx_.sim.decoherence->validate();
}

const GateSet::Entry& GateSet::cached(const std::string& key,
                                      const std::function<Entry()>& make) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(key, make()).first->second;
}

TagParams tag_design(const EffectiveZZParams& p, const TagGate& g,
                     int spectator_state) {
  if (g.qubit != 0 && g.qubit != 1) throw ValidationError("TAG qubit must be 0 or 1");
  if (g.axis != 'x' && g.axis != 'y') throw ValidationError("TAG axis must be x or y");
  if (spectator_state != 0 && spectator_state != 1)
    throw ValidationError("spectator state must be 0 or 1");
  TagParams tp = solve_tag(p.gz, std::abs(g.angle), spectator_state ? -1 : 1);
  tp.carrier = (g.qubit == 0 ? p.omega1 : p.omega2) + spectator_state * p.gz;
  tp.phase = (g.axis == 'y' ? kPi / 2 : 0.0) + (g.angle < 0.0 ? kPi : 0.0);
  return tp;
}

GateSet::Entry GateSet::make_tag(const TagGate& g, int spectator_state) const {
  if (g.qubit != 0 && g.qubit != 1) throw ValidationError("TAG qubit must be 0 or 1");
  if (g.axis != 'x' && g.axis != 'y') throw ValidationError("TAG axis must be x or y");
  const auto& p = ctx_.model.params;
  const int spectator = 1 - g.qubit;
  const CMatrix ideal = ideal_gate(g);
  Entry e;
  if (g.angle == 0.0) {
    e.unitary = CMatrix::Identity(4, 4);
    e.process = QuantumProcess::from_unitary(e.unitary);
    return e;
  }
  const TagParams tp = tag_design(p, g, spectator_state);
  const PulseWaveform w = tag_waveform(tp, ctx_.tag_period, g.qubit);

  SimulationOptions closed = ctx_.sim;
  closed.decoherence.reset();
  // Carrier detuned from the logical frame leaves a frame rotation on the
  // target; undo it with a frame update before fixing the spectator blocks.
  CMatrix track = CMatrix::Identity(2, 2);
  track(1, 1) = std::polar(1.0, (tp.carrier - (g.qubit == 0 ? p.omega1 : p.omega2)) *
                                    w.duration());
  const CMatrix u0 = simulate_gate(w, ctx_.model, closed).process.unitary();
  const CMatrix u = on_qubit(track, g.qubit) * u0;
  const CMatrix fix =
      on_qubit(block_phase_correction(u, ideal, spectator), spectator) * on_qubit(track, g.qubit);
  e.unitary = fix * u0;
  const auto frame = QuantumProcess::from_unitary(fix);
  if (ctx_.sim.decoherence)
    e.process = simulate_gate(w, ctx_.model, ctx_.sim).process.then(frame);
  else
    e.process = QuantumProcess::from_unitary(e.unitary);
  return e;
}

QuantumProcess GateSet::tag(const TagGate& g, int spectator_state) const {
  const std::string key = "tag:" + std::to_string(g.qubit) + g.axis + key_number(g.angle) +
                          ":" + std::to_string(spectator_state);
  return cached(key, [&] { return make_tag(g, spectator_state); }).process;
}

CMatrix GateSet::tag_unitary(const TagGate& g, int spectator_state) const {
  const std::string key = "tag:" + std::to_string(g.qubit) + g.axis + key_number(g.angle) +
                          ":" + std::to_string(spectator_state);
  return cached(key, [&] { return make_tag(g, spectator_state); }).unitary;
}

GateSet::Entry GateSet::make_swipht(bool idle) const {
  const auto& p = ctx_.model.params;
  const SwiphtDesign d = SwiphtDesign::for_coupling(p.gz);
  const PulseWaveform w = swipht_waveform(d, ctx_.swipht_samples, p.omega2);
  const double t_idle = std::max(0.0, kTwoPi / p.gz - d.tg);

  SimulationOptions closed = ctx_.sim;
  closed.decoherence.reset();
  CMatrix u = simulate_gate(w, ctx_.model, closed).process.unitary();
  if (idle) u = free_evolution(p, t_idle).unitary() * u;
  Entry e;
  e.phi = extract_cnot_phase(u).phi;
  const CMatrix fix = on_qubit(block_phase_correction(u, generalized_cnot(e.phi), 0), 0);
  e.unitary = fix * u;
  const auto frame = QuantumProcess::from_unitary(fix);
  if (ctx_.sim.decoherence) {
    QuantumProcess s = simulate_gate(w, ctx_.model, ctx_.sim).process;
    if (idle) s = s.then(free_evolution(p, t_idle, ctx_.sim.decoherence));
    e.process = s.then(frame);
  } else {
    e.process = QuantumProcess::from_unitary(e.unitary);
  }
  return e;
}

QuantumProcess GateSet::swipht_cnot(double* phi) const {
  const Entry& e = cached("swipht:idle", [&] { return make_swipht(true); });
  if (phi) *phi = e.phi;
  return e.process;
}

QuantumProcess GateSet::swipht_pulse(double* phi) const {
  const Entry& e = cached("swipht:bare", [&] { return make_swipht(false); });
  if (phi) *phi = e.phi;
  return e.process;
}

QuantumProcess GateSet::free_cz() const {
  return cached("cz", [&] {
           Entry e;
           const double t = cz_gate_time(ctx_.model.params.gz);
           e.process = free_evolution(ctx_.model.params, t, ctx_.sim.decoherence);
           e.unitary = free_evolution(ctx_.model.params, t).unitary();
           return e;
         }).process;
}

// Randomized benchmarking

std::string to_string(Transition t) {
  switch (t) {
    case Transition::T00_10: return "00-10";
    case Transition::T01_11: return "01-11";
    case Transition::T00_01: return "00-01";
    case Transition::T10_11: return "10-11";
  }
  return "";
}

Transition transition_from_string(const std::string& s) {
  for (auto t : {Transition::T00_10, Transition::T01_11, Transition::T00_01,
                 Transition::T10_11})
    if (s == to_string(t)) return t;
  throw ValidationError("unknown transition '" + s + "' (use 00-10, 01-11, 00-01, 10-11)");
}

int target_qubit(Transition t) {
  return t == Transition::T00_10 || t == Transition::T01_11 ? 0 : 1;
}

int spectator_state(Transition t) {
  return t == Transition::T01_11 || t == Transition::T10_11 ? 1 : 0;
}

std::string to_string(const RbGate& g) {
  return std::string(1, g.axis) + "(" + key_number(g.angle / kPi) + "pi)";
}

CMatrix rb_gate_unitary(const RbGate& g) { return ideal_rotation(g.axis, g.angle); }

std::vector<RbGate> recovery_candidates() {
  return {{'x', kPi / 2}, {'x', -kPi / 2}, {'y', kPi / 2}, {'y', -kPi / 2},
          {'x', kPi},     {'x', -kPi},     {'y', kPi},     {'y', -kPi},
          {'z', kPi / 2}, {'z', -kPi / 2}, {'z', kPi},     {'z', -kPi}};
}

std::vector<RbGate> find_recovery(const CVector& state) {
  auto ground = [](const CVector& v) { return std::norm(v(0)) > 1.0 - 1e-9; };
  if (ground(state)) return {};
  const auto cands = recovery_candidates();
  for (const auto& g : cands)
    if (ground(rb_gate_unitary(g) * state)) return {g};
  for (const auto& g1 : cands)
    for (const auto& g2 : cands)
      if (ground(rb_gate_unitary(g2) * (rb_gate_unitary(g1) * state))) return {g1, g2};
  throw NoRoot("no recovery of length <= 2 reaches the ground state");
}

std::vector<RBSequence> generate_rb_sequences(int n_pi2_seqs, int n_pi_seqs,
                                              int max_pairs, int stride,
                                              std::uint64_t seed) {
  if (n_pi2_seqs < 1 || n_pi_seqs < 1 || max_pairs < 1 || stride < 1)
    throw OutOfRange("RB sequence counts, length and stride must be >= 1");
  std::mt19937_64 rng(splitmix64(seed));
  const RbGate half[4] = {{'x', -kPi / 2}, {'x', kPi / 2}, {'y', -kPi / 2}, {'y', kPi / 2}};
  const RbGate full[8] = {{'0', 0.0}, {'0', 0.0},   {'x', -kPi}, {'x', kPi},
                          {'y', -kPi}, {'y', kPi}, {'z', -kPi}, {'z', kPi}};
  std::vector<std::vector<RbGate>> halves(n_pi2_seqs), fulls(n_pi_seqs);
  for (auto& s : halves)
    for (int k = 0; k < max_pairs; ++k) s.push_back(half[rng() % 4]);
  for (auto& s : fulls)
    for (int k = 0; k < max_pairs; ++k) s.push_back(full[rng() % 8]);

  std::vector<RBSequence> out;
  for (int i = 0; i < n_pi2_seqs; ++i)
    for (int j = 0; j < n_pi_seqs; ++j) {
      RBSequence seq;
      seq.seed = seed;
      CVector psi = basis_ket(2, 0);
      for (int k = 0; k < max_pairs; ++k) {
        seq.gates.push_back(fulls[j][k]);
        seq.gates.push_back(halves[i][k]);
        psi = rb_gate_unitary(halves[i][k]) * (rb_gate_unitary(fulls[j][k]) * psi);
        if ((k + 1) % stride == 0) {
          seq.truncations.push_back(k + 1);
          seq.recovery.push_back(find_recovery(psi));
        }
      }
      out.push_back(std::move(seq));
    }
  return out;
}

namespace {

QuantumProcess rb_process(const RbGate& g, int qubit, int spectator_state,
                          const GateSet& gates) {
  if (g.axis == '0') return QuantumProcess::from_unitary(CMatrix::Identity(4, 4));
  if (g.axis == 'z')
    return QuantumProcess::from_unitary(on_qubit(rotation_z(g.angle), qubit));
  return gates.tag({qubit, g.axis, g.angle}, spectator_state);
}

}  // namespace

RbResult run_rb(Transition t, const GateSet& gates, const RbOptions& opt,
                const ShotSampler& sampler) {
  if (opt.shots < 1) throw OutOfRange("RB needs at least one shot");
  RbResult res;
  res.transition = t;
  res.sequences = generate_rb_sequences(opt.n_pi2_seqs, opt.n_pi_seqs, opt.max_pairs,
                                        opt.stride, sampler.master());
  const int q = target_qubit(t), s = spectator_state(t);

  // Warm the gate cache serially so workers only read it.
  for (const auto& g : recovery_candidates()) rb_process(g, q, s, gates);

  const std::size_t nseq = res.sequences.size();
  const std::size_t ntr = res.sequences.front().truncations.size();
  std::vector<std::vector<double>> survival(nseq, std::vector<double>(ntr, 0.0));
  const int start = q == 0 ? s : 2 * s;
  parallel_for(nseq, [&](std::size_t i) {
    const RBSequence& seq = res.sequences[i];
    CMatrix rho = CMatrix::Zero(4, 4);
    rho(start, start) = 1.0;
    std::size_t next_tr = 0;
    for (int k = 0; k < seq.pairs() && next_tr < ntr; ++k) {
      rho = rb_process(seq.gates[2 * k], q, s, gates).apply(rho);
      rho = rb_process(seq.gates[2 * k + 1], q, s, gates).apply(rho);
      if (k + 1 != seq.truncations[next_tr]) continue;
      CMatrix fin = rho;
      for (const auto& g : seq.recovery[next_tr]) fin = rb_process(g, q, s, gates).apply(fin);
      double p0 = 0.0;
      for (int idx = 0; idx < 4; ++idx)
        if (((q == 0 ? idx >> 1 : idx & 1)) == 0) p0 += fin(idx, idx).real();
      p0 = std::clamp(p0, 0.0, 1.0);
      auto rng = sampler.stream(i * ntr + next_tr);
      std::binomial_distribution<long> bin(opt.shots, p0);
      survival[i][next_tr] = static_cast<double>(bin(rng)) / opt.shots;
      ++next_tr;
    }
  });

  for (std::size_t j = 0; j < ntr; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < nseq; ++i) mean += survival[i][j];
    mean /= nseq;
    double var = 0.0;
    for (std::size_t i = 0; i < nseq; ++i) var += std::pow(survival[i][j] - mean, 2);
    const double sd = nseq > 1 ? std::sqrt(var / (nseq - 1)) : 0.0;
    res.table.push_back({static_cast<double>(res.sequences.front().truncations[j]), mean,
                         sd / std::sqrt(static_cast<double>(nseq))});
  }
  res.fit = fit_decay(res.table);
  return res;
}

// Tomography

std::vector<PrepCircuit> prepare_input_states() {
  struct One {
    const char* name;
    std::vector<std::pair<char, double>> ops;
  };
  const One singles[6] = {{"+z", {}},
                          {"-z", {{'x', kPi}}},
                          {"+x", {{'y', kPi / 2}}},
                          {"-x", {{'y', -kPi / 2}}},
                          {"+y", {{'x', -kPi / 2}}},
                          {"-y", {{'x', kPi / 2}}}};
  std::vector<PrepCircuit> out;
  for (const auto& a : singles)
    for (const auto& b : singles) {
      PrepCircuit c;
      c.label = std::string(a.name) + "," + b.name;
      for (const auto& [ax, ang] : a.ops) c.gates.push_back({0, ax, ang});
      for (const auto& [ax, ang] : b.ops) c.gates.push_back({1, ax, ang});
      CVector psi = basis_ket(4, 0);
      for (const auto& g : c.gates) psi = ideal_gate(g) * psi;
      c.ideal = psi;
      out.push_back(std::move(c));
    }
  return out;
}

QuantumProcess prep_process(const PrepCircuit& c, const GateSet& gates) {
  QuantumProcess p = QuantumProcess::from_unitary(CMatrix::Identity(4, 4));
  for (const auto& g : c.gates)
    p = p.then(gates.context().perfect_prep ? QuantumProcess::from_unitary(ideal_gate(g))
                                            : gates.tag(g, 0));
  return p;
}

std::vector<std::array<double, 4>> setting_probabilities(
    const CMatrix& rho, const std::vector<TomographySetting>& settings) {
  std::vector<std::array<double, 4>> out;
  for (const auto& s : settings) {
    const CMatrix r = s.rotation * rho * s.rotation.adjoint();
    std::array<double, 4> p{};
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) sum += p[k] = std::max(0.0, r(k, k).real());
    for (auto& v : p) v /= sum;
    out.push_back(p);
  }
  return out;
}

namespace {

std::vector<std::array<long, 4>> sample_cell_row(
    const CMatrix& rho, const std::vector<TomographySetting>& settings,
    const ShotSampler& sampler, long shots, std::uint64_t input_index) {
  const auto probs = setting_probabilities(rho, settings);
  std::vector<std::array<long, 4>> row;
  for (std::size_t s = 0; s < settings.size(); ++s) {
    auto rng = sampler.stream(input_index * settings.size() + s);
    const auto c = ShotSampler::multinomial({probs[s].begin(), probs[s].end()}, shots, rng);
    row.push_back({c[0], c[1], c[2], c[3]});
  }
  return row;
}

CMatrix ground_state() {
  CMatrix r = CMatrix::Zero(4, 4);
  r(0, 0) = 1.0;
  return r;
}

}  // namespace

TomographyDataset run_qst(const QuantumProcess& prep, const QuantumProcess& process,
                          const std::vector<TomographySetting>& settings,
                          const ShotSampler& sampler, long shots,
                          std::uint64_t input_index) {
  if (shots < 1) throw OutOfRange("tomography needs at least one shot");
  TomographyDataset d;
  d.kind = "QST";
  d.inputs = {"prep"};
  for (const auto& s : settings) d.settings.push_back(s.label);
  d.shots = shots;
  d.seed = sampler.master();
  const CMatrix rho = process.apply(prep.apply(ground_state()));
  d.counts.push_back(sample_cell_row(rho, settings, sampler, shots, input_index));
  return d;
}

std::string to_string(QptGate g) { return g == QptGate::SwiphtCnot ? "cnot" : "cz"; }

QptGate qpt_gate_from_string(const std::string& s) {
  if (s == "cnot") return QptGate::SwiphtCnot;
  if (s == "cz") return QptGate::FreeCz;
  throw ValidationError("unknown gate '" + s + "' (use cnot or cz)");
}

QptRun run_qpt(QptGate gate, const GateSet& gates, const ShotSampler& sampler,
               long shots) {
  if (shots < 1) throw OutOfRange("tomography needs at least one shot");
  const auto& p = gates.context().model.params;
  QptRun run;
  if (gate == QptGate::SwiphtCnot) {
    run.process = gates.swipht_cnot(&run.phi);
    run.ideal = generalized_cnot(run.phi);
    run.duration = kTwoPi / p.gz;
  } else {
    run.process = gates.free_cz();
    run.ideal = free_evolution_cz(p).unitary();
    run.duration = cz_gate_time(p.gz);
  }
  const auto preps = prepare_input_states();
  const auto settings = tomography_settings();
  std::vector<QuantumProcess> prep_maps;
  for (const auto& c : preps) prep_maps.push_back(prep_process(c, gates));

  TomographyDataset& d = run.dataset;
  d.kind = "QPT";
  d.gate = to_string(gate);
  for (const auto& c : preps) d.inputs.push_back(c.label);
  for (const auto& s : settings) d.settings.push_back(s.label);
  d.shots = shots;
  d.seed = sampler.master();
  d.counts.resize(preps.size());
  parallel_for(preps.size(), [&](std::size_t i) {
    const CMatrix rho = run.process.apply(prep_maps[i].apply(ground_state()));
    d.counts[i] = sample_cell_row(rho, settings, sampler, shots, i);
  });
  return run;
}

std::vector<ProcessObservation> process_observations(
    const TomographyDataset& d, const std::vector<PrepCircuit>& preps,
    const std::vector<TomographySetting>& settings) {
  if (d.counts.size() != preps.size())
    throw DimensionMismatch("dataset inputs do not match the preparation list");
  std::vector<ProcessObservation> out;
  for (std::size_t i = 0; i < preps.size(); ++i) {
    ProcessObservation o;
    o.input = projector(preps[i].ideal);
    o.settings = state_observations(d, settings, i);
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<SettingCounts> state_observations(
    const TomographyDataset& d, const std::vector<TomographySetting>& settings,
    std::size_t input) {
  if (input >= d.counts.size() || d.counts[input].size() != settings.size())
    throw DimensionMismatch("dataset settings do not match the settings model");
  std::vector<SettingCounts> out;
  for (std::size_t s = 0; s < settings.size(); ++s) {
    SettingCounts sc;
    sc.povm = setting_povm(settings[s].rotation);
    for (long c : d.counts[input][s]) sc.counts.push_back(static_cast<double>(c));
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace zzforge
