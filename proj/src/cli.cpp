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


#include "zzforge/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "zzforge/experiments.hpp"
#include "zzforge/pulse_design.hpp"

namespace zzforge {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Meta {
  std::string command;
  std::string hash;
  std::optional<std::uint64_t> seed;
};

json meta_json(const Meta& m) {
  json j{{"command", m.command}, {"config_hash", m.hash}};
  j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
  return j;
}

std::string seed_text(const Meta& m) {
  return m.seed ? std::to_string(*m.seed) : std::string();
}

json complex_matrix(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(row);
  }
  return rows;
}

json real_matrix(const RMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json dataset_json(const TomographyDataset& d) {
  json counts = json::array();
  for (const auto& per_input : d.counts) {
    json row = json::array();
    for (const auto& cell : per_input)
      row.push_back(json::array({cell[0], cell[1], cell[2], cell[3]}));
    counts.push_back(row);
  }
  return json{{"kind", d.kind},       {"gate", d.gate},
              {"shots", d.shots},     {"seed", d.seed},
              {"inputs", d.inputs},   {"settings", d.settings},
              {"outcomes", {"00", "01", "10", "11"}},
              {"counts", counts}};
}

class Csv {
 public:
  Csv(std::vector<std::string> header, const Meta& meta)
      : hash_(meta.hash), seed_(seed_text(meta)) {
    header.push_back("config_hash");
    header.push_back("seed");
    line(header);
  }
  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_number(v));
    cells.push_back(hash_);
    cells.push_back(seed_);
    line(cells);
  }
  const std::string& text() const { return text_; }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) text_ += ',';
      text_ += cells[k];
    }
    text_ += "\r\n";
  }
  std::string hash_, seed_, text_;
};

struct Outputs {
  fs::path dir;
  std::ostream& log;

  void json_file(const std::string& name, const json& j) const {
    write_atomic(dir / name, j.dump(2) + "\n");
    log << "wrote " << (dir / name).string() << "\n";
  }
  void text_file(const std::string& name, const std::string& t) const {
    write_atomic(dir / name, t);
    log << "wrote " << (dir / name).string() << "\n";
  }
};

double hz(double rad_per_s) { return rad_per_s / kTwoPi; }

std::string waveform_csv(const PulseWaveform& w, const Meta& meta) {
  Csv csv({"time_s", "envelope_re_rad_per_s", "envelope_im_rad_per_s"}, meta);
  for (std::size_t k = 0; k < w.samples.size(); ++k)
    csv.row({static_cast<double>(k) * w.period, w.samples[k].real(),
             w.samples[k].imag()});
  return csv.text();
}

void require_logical4(const SimulationOptions& so, const std::string& command) {
  if (so.model != ModelKind::Logical4)
    throw Unsupported(command + " runs on the logical4 model only");
}

std::uint64_t require_seed(const Meta& m) {
  if (!m.seed)
    throw ValidationError(m.command +
                          " samples shots: give --seed or experiment.seed");
  return *m.seed;
}

ExperimentContext context_of(const RunConfig& cfg, const DerivedDevice& dev,
                             const SimulationOptions& so) {
  ExperimentContext ctx;
  ctx.model = dev.model;
  ctx.sim = so;
  ctx.tag_period = cfg.simulation.tag_period_s;
  ctx.swipht_samples = cfg.simulation.swipht_samples;
  ctx.perfect_prep = cfg.experiment.perfect_prep;
  return ctx;
}

json params_json(const EffectiveZZParams& p) {
  return json{{"omega1_hz", hz(p.omega1)},
              {"omega2_hz", hz(p.omega2)},
              {"gz_hz", hz(p.gz)},
              {"eta_hz", hz(p.eta)},
              {"lambda_zz_hz", hz(p.lambda_zz)},
              {"beta", real_matrix(p.beta)}};
}

int cmd_derive(const RunConfig& cfg, const Meta& meta, const Outputs& out) {
  const DerivedDevice dev = derive_device(cfg);
  const auto& p = dev.model.params;
  const auto& s = dev.spectrum;
  json j = meta_json(meta);
  j["params"] = params_json(p);
  j["zz_branches_hz"] = {{"qubit1", hz(s.zz_branch_qubit1())},
                         {"qubit2", hz(s.zz_branch_qubit2())}};
  j["spectrum_hz"] = {{"00-10", hz(s.t00_10)}, {"00-01", hz(s.t00_01)},
                      {"01-11", hz(s.t01_11)}, {"10-11", hz(s.t10_11)},
                      {"10-20", hz(s.t10_20)}, {"01-02", hz(s.t01_02)}};
  if (dev.calibration) {
    const auto& c = *dev.calibration;
    j["calibration"] = {
        {"qubit1", {{"omega01_hz", hz(c.q1.omega01)},
                    {"anharmonicity_hz", hz(c.q1.anharmonicity)}}},
        {"qubit2", {{"omega01_hz", hz(c.q2.omega01)},
                    {"anharmonicity_hz", hz(c.q2.anharmonicity)}}},
        {"g1_hz", hz(c.coupling.g1)},
        {"rms_residual_hz", hz(c.rms_residual)}};
  }
  j["cz_gate_time_s"] = cz_gate_time(p.gz);
  j["swipht_gate_time_s"] = swipht_gate_time(p.gz);
  out.json_file("derive.json", j);
  out.log << "g_z/2pi = " << format_number(hz(p.gz)) << " Hz\n";
  return 0;
}

int cmd_pulse_tag(const RunConfig& cfg, const CliOptions& opt, const Meta& meta,
                  const Outputs& out) {
  const DerivedDevice dev = derive_device(cfg);
  TagGate g{opt.qubit - 1, opt.axis, opt.theta};
  int spectator = opt.spectator;
  if (opt.transition) {
    const Transition t = transition_from_string(*opt.transition);
    g.qubit = target_qubit(t);
    spectator = spectator_state(t);
  }
  if (g.qubit != 0 && g.qubit != 1) throw ValidationError("--qubit must be 1 or 2");
  const TagParams tp = tag_design(dev.model.params, g, spectator);
  const PulseWaveform w = tag_waveform(tp, cfg.simulation.tag_period_s, g.qubit);
  const TagResiduals r = tag_residuals(tp);
  json j = meta_json(meta);
  j["qubit"] = g.qubit + 1;
  j["spectator_state"] = spectator;
  j["axis"] = std::string(1, g.axis);
  j["theta_rad"] = g.angle;
  j["omega_br_rad_per_s"] = tp.omega_br;
  j["omega_qr_rad_per_s"] = tp.omega_qr;
  j["tau_br_s"] = tp.tau_br;
  j["tau_qr_s"] = tp.tau_qr;
  j["carrier_hz"] = hz(tp.carrier);
  j["phase_rad"] = tp.phase;
  j["detuning_rad_per_s"] = tp.detuning;
  j["duration_s"] = tp.duration();
  j["sample_period_s"] = w.period;
  j["samples"] = w.samples.size();
  j["residuals_rad"] = {{"c1", r.c1}, {"c2", r.c2}, {"c3", r.c3}, {"c4", r.c4}};
  out.text_file("tag_waveform.csv", waveform_csv(w, meta));
  out.json_file("tag_params.json", j);
  out.log << "TAG duration " << format_number(tp.duration()) << " s\n";
  return 0;
}

int cmd_pulse_swipht(const RunConfig& cfg, const Meta& meta, const Outputs& out) {
  const DerivedDevice dev = derive_device(cfg);
  const auto& p = dev.model.params;
  const SwiphtDesign d = SwiphtDesign::for_coupling(p.gz);
  const PulseWaveform w = swipht_waveform(d, cfg.simulation.swipht_samples, p.omega2);
  json j = meta_json(meta);
  j["a"] = d.a;
  j["gate_time_s"] = d.tg;
  j["duration_s"] = w.duration();
  j["gz_rad_per_s"] = d.gz;
  j["carrier_hz"] = hz(w.carrier);
  j["qubit"] = w.qubit + 1;
  j["samples"] = w.samples.size();
  j["max_chi_dot_over_gz"] = swipht_max_chi_dot(d, 10000) / d.gz;
  out.text_file("swipht_waveform.csv", waveform_csv(w, meta));
  out.json_file("swipht_params.json", j);
  out.log << "SWIPHT duration " << format_number(w.duration()) << " s\n";
  return 0;
}

// Logical-subspace report shared by sim-cz and sim-cnot.
void write_sim(const std::string& stem, const RunConfig& cfg,
               const SimulationOptions& so, const RMatrix& r, const CMatrix& ideal,
               const std::optional<CMatrix>& unitary, double leakage,
               double duration, json extra, const Meta& meta,
               const Outputs& out) {
  const double f = average_gate_fidelity(r, ptm_of_unitary(ideal));
  json proc = meta_json(meta);
  proc["ptm"] = real_matrix(r);
  proc["ideal"] = complex_matrix(ideal);
  if (unitary) proc["unitary"] = complex_matrix(*unitary);
  json rep = meta_json(meta);
  rep["model"] = to_string(so.model);
  rep["decoherence"] = so.decoherence.has_value();
  rep["average_gate_fidelity"] = f;
  rep["duration_s"] = duration;
  rep["leakage"] = leakage;
  for (auto& [k, v] : extra.items()) rep[k] = v;
  out.json_file(stem + "_process.json", proc);
  out.json_file(stem + "_report.json", rep);
  if (so.model == ModelKind::ThreeLevel) {
    json lk = meta_json(meta);
    lk["leakage"] = leakage;
    lk["levels"] = cfg.device.levels;
    out.json_file(stem + "_leakage.json", lk);
  }
  out.log << "average gate fidelity " << format_number(f) << "\n";
}

int cmd_sim_cz(const RunConfig& cfg, const Meta& meta, const Outputs& out) {
  const DerivedDevice dev = derive_device(cfg);
  const SimulationOptions so = simulation_options(cfg);
  const auto& p = dev.model.params;
  const double t = cz_gate_time(p.gz);
  CMatrix ideal = CMatrix::Identity(4, 4);
  ideal(3, 3) = -1.0;
  RMatrix r;
  double leakage = 0.0;
  std::optional<CMatrix> u;
  if (so.model == ModelKind::Logical4) {
    const QuantumProcess q = free_evolution(p, t, so.decoherence);
    r = ptm_of_process(q);
    if (q.kind() == QuantumProcess::Kind::Unitary) u = q.unitary();
  } else {
    PulseWaveform idle;
    idle.samples.assign(1000, Complex{0.0, 0.0});
    idle.period = t / 1000.0;
    const GateSimulation sim = simulate_gate(idle, dev.model, so);
    r = logical_ptm(sim);
    leakage = sim.leakage;
  }
  write_sim("sim_cz", cfg, so, r, ideal, u, leakage, t, json::object(), meta, out);
  return 0;
}

int cmd_sim_cnot(const RunConfig& cfg, const Meta& meta, const Outputs& out) {
  const DerivedDevice dev = derive_device(cfg);
  const SimulationOptions so = simulation_options(cfg);
  const auto& p = dev.model.params;
  const SwiphtDesign d = SwiphtDesign::for_coupling(p.gz);
  const PulseWaveform w = swipht_waveform(d, cfg.simulation.swipht_samples, p.omega2);
  const double t_idle = std::max(0.0, kTwoPi / p.gz - d.tg);

  SimulationOptions closed = so;
  closed.decoherence.reset();
  const GateSimulation cs = simulate_gate(w, dev.model, closed);
  const CMatrix idle_u = free_evolution(p, t_idle).unitary();
  const CMatrix block = idle_u * logical_block(cs);
  const CnotPhase ph = extract_cnot_phase(block);
  const CMatrix ideal = generalized_cnot(ph.phi);
  const CMatrix fix = on_qubit(block_phase_correction(block, ideal, 0), 0);

  const GateSimulation sim = so.decoherence ? simulate_gate(w, dev.model, so) : cs;
  const RMatrix r = ptm_of_unitary(fix) *
                    ptm_of_process(free_evolution(p, t_idle, so.decoherence)) *
                    logical_ptm(sim);
  std::optional<CMatrix> u;
  if (so.model == ModelKind::Logical4 && !so.decoherence) u = fix * block;
  const CMatrix fb = fix * block;
  json extra{{"phi_rad", ph.phi},
             {"phase_fit_residual", ph.residual},
             {"pulse_duration_s", d.tg},
             {"idle_s", t_idle},
             {"harmful_transition_population", std::norm(block(3, 2))},
             {"target_block_fidelity", block_fidelities(fb, ideal, 0)[0]},
             {"harmful_block_fidelity", block_fidelities(fb, ideal, 0)[1]}};
  write_sim("sim_cnot", cfg, so, r, ideal, u, sim.leakage, d.tg + t_idle, extra,
            meta, out);
  return 0;
}

int cmd_rb(const RunConfig& cfg, const CliOptions& opt, const Meta& meta,
           const Outputs& out) {
  const std::uint64_t seed = require_seed(meta);
  const SimulationOptions so = simulation_options(cfg);
  require_logical4(so, "rb");
  const DerivedDevice dev = derive_device(cfg);
  GateSet gates(context_of(cfg, dev, so));
  const Transition t = transition_from_string(opt.transition.value_or("01-11"));
  RbOptions ro;
  ro.n_pi2_seqs = cfg.experiment.rb_pi2_sequences;
  ro.n_pi_seqs = cfg.experiment.rb_pi_sequences;
  ro.max_pairs = cfg.experiment.rb_max_pairs;
  ro.stride = cfg.experiment.rb_stride;
  ro.shots = cfg.experiment.shots;
  const RbResult res = run_rb(t, gates, ro, ShotSampler(seed));

  Csv csv({"m", "mean_fidelity", "stderr"}, meta);
  for (const auto& pt : res.table) csv.row({pt.m, pt.mean, pt.stderr_});
  json j = meta_json(meta);
  j["transition"] = to_string(t);
  j["decoherence"] = so.decoherence.has_value();
  j["sequences"] = res.sequences.size();
  j["shots"] = ro.shots;
  j["fit"] = {{"a", res.fit.a},
              {"offset_fixed", res.fit.offset_fixed},
              {"p", res.fit.p},
              {"b", res.fit.b},
              {"fidelity", res.fit.fidelity},
              {"covariance", real_matrix(res.fit.covariance)},
              {"rss", res.fit.rss}};
  json seqs = json::array();
  for (const auto& s : res.sequences) {
    json gates_j = json::array();
    for (const auto& g : s.gates) gates_j.push_back(to_string(g));
    seqs.push_back({{"seed", s.seed}, {"gates", gates_j},
                    {"truncations", s.truncations}});
  }
  j["sequence_list"] = seqs;
  out.text_file("rb_decay.csv", csv.text());
  out.json_file("rb_fit.json", j);
  out.log << "RB fidelity per pi/2 gate " << format_number(res.fit.fidelity) << "\n";
  return 0;
}

int cmd_qst(const RunConfig& cfg, const Meta& meta, const Outputs& out) {
  const std::uint64_t seed = require_seed(meta);
  const SimulationOptions so = simulation_options(cfg);
  require_logical4(so, "qst");
  const DerivedDevice dev = derive_device(cfg);
  GateSet gates(context_of(cfg, dev, so));
  const auto preps = prepare_input_states();
  std::size_t idx = 0;
  while (idx < preps.size() && preps[idx].label != "+x,+z") ++idx;
  const QuantumProcess prep = prep_process(preps[idx], gates);
  double phi = 0.0;
  const QuantumProcess cnot = gates.swipht_cnot(&phi);
  const auto settings = tomography_settings();
  const TomographyDataset ds =
      run_qst(prep, cnot, settings, ShotSampler(seed), cfg.experiment.shots, idx);
  const MleStateResult mle = mle_density_matrix(state_observations(ds, settings));
  const CVector ideal = generalized_cnot(phi) * preps[idx].ideal;
  const double f = state_fidelity(mle.rho, ideal);

  json dj = meta_json(meta);
  dj["dataset"] = dataset_json(ds);
  json rj = meta_json(meta);
  rj["rho"] = complex_matrix(mle.rho.matrix());
  json rep = meta_json(meta);
  rep["fidelity"] = f;
  rep["phi_rad"] = phi;
  rep["decoherence"] = so.decoherence.has_value();
  rep["perfect_prep"] = cfg.experiment.perfect_prep;
  rep["mle_converged"] = mle.converged;
  rep["mle_iterations"] = mle.iterations;
  rep["gradient_norm"] = mle.gradient_norm;
  rep["ideal_state"] = complex_matrix(ideal);
  out.json_file("qst_dataset.json", dj);
  out.json_file("qst_rho.json", rj);
  out.json_file("qst_report.json", rep);
  out.log << "state fidelity " << format_number(f) << "\n";
  return mle.converged ? 0 : 2;
}

int cmd_qpt(const RunConfig& cfg, const CliOptions& opt, const Meta& meta,
            const Outputs& out) {
  const std::uint64_t seed = require_seed(meta);
  const SimulationOptions so = simulation_options(cfg);
  require_logical4(so, "qpt");
  const DerivedDevice dev = derive_device(cfg);
  GateSet gates(context_of(cfg, dev, so));
  const QptGate g = qpt_gate_from_string(opt.gate);
  const QptRun run = run_qpt(g, gates, ShotSampler(seed), cfg.experiment.shots);
  const auto obs = process_observations(run.dataset, prepare_input_states(),
                                        tomography_settings());
  const PtmResult est = mle_ptm(obs);
  const RMatrix ideal = ptm_of_unitary(run.ideal);
  const double f = average_gate_fidelity(est.r, ideal);

  json dj = meta_json(meta);
  dj["dataset"] = dataset_json(run.dataset);
  json pj = meta_json(meta);
  pj["ptm"] = real_matrix(est.r);
  pj["ideal_ptm"] = real_matrix(ideal);
  json rep = meta_json(meta);
  rep["gate"] = to_string(g);
  rep["average_gate_fidelity"] = f;
  rep["simulated_process_fidelity"] =
      average_gate_fidelity(ptm_of_process(run.process), ideal);
  rep["ptm_purity"] = ptm_purity(est.r);
  rep["phi_rad"] = run.phi;
  rep["duration_s"] = run.duration;
  rep["decoherence"] = so.decoherence.has_value();
  rep["perfect_prep"] = cfg.experiment.perfect_prep;
  rep["projection_converged"] = est.converged;
  rep["alternations"] = est.alternations;
  rep["mle_iterations"] = est.mle_iterations;
  rep["min_choi_eigenvalue"] = est.min_choi_eigenvalue;
  out.json_file("qpt_dataset.json", dj);
  out.json_file("qpt_ptm.json", pj);
  out.json_file("qpt_report.json", rep);
  out.log << "average gate fidelity " << format_number(f) << "\n";
  return est.converged ? 0 : 2;
}

}  // namespace

const std::vector<std::string>& cli_commands() {
  static const std::vector<std::string> c{"derive",  "pulse-tag", "pulse-swipht",
                                          "sim-cz",  "sim-cnot",  "rb",
                                          "qst",     "qpt"};
  return c;
}

std::string format_number(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void write_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot write '" + tmp.string() + "'");
    f << text;
    f.flush();
    if (!f) throw ValidationError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

double parse_angle(const std::string& s) {
  auto number = [&](std::string_view v) {
    double x = 0.0;
    auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
      throw ValidationError("cannot read angle '" + s + "'");
    return x;
  };
  std::string_view v = s;
  double sign = 1.0;
  if (!v.empty() && (v[0] == '-' || v[0] == '+')) {
    if (v[0] == '-') sign = -1.0;
    v.remove_prefix(1);
  }
  const auto pi = v.find("pi");
  if (pi == std::string_view::npos) return sign * number(v);
  double value = kPi;
  std::string_view before = v.substr(0, pi), after = v.substr(pi + 2);
  if (!before.empty()) {
    if (before.back() != '*') throw ValidationError("cannot read angle '" + s + "'");
    value *= number(before.substr(0, before.size() - 1));
  }
  if (!after.empty()) {
    if (after[0] != '/') throw ValidationError("cannot read angle '" + s + "'");
    value /= number(after.substr(1));
  }
  return sign * value;
}

int dispatch(const std::string& command, RunConfig cfg, const CliOptions& opt,
             std::ostream& out, std::ostream& err) {
  try {
    if (opt.seed) cfg.experiment.seed = opt.seed;
    if (opt.shots) cfg.experiment.shots = *opt.shots;
    if (opt.decoherence) cfg.coherence.enabled = *opt.decoherence;
    if (opt.model) cfg.simulation.model = *opt.model;
    if (opt.perfect_prep) cfg.experiment.perfect_prep = *opt.perfect_prep;
    validate(cfg);
    const Meta meta{command, config_hash(cfg), cfg.experiment.seed};
    const Outputs files{fs::path(opt.out.value_or(cfg.output_dir)), out};
    if (command == "derive") return cmd_derive(cfg, meta, files);
    if (command == "pulse-tag") return cmd_pulse_tag(cfg, opt, meta, files);
    if (command == "pulse-swipht") return cmd_pulse_swipht(cfg, meta, files);
    if (command == "sim-cz") return cmd_sim_cz(cfg, meta, files);
    if (command == "sim-cnot") return cmd_sim_cnot(cfg, meta, files);
    if (command == "rb") return cmd_rb(cfg, opt, meta, files);
    if (command == "qst") return cmd_qst(cfg, meta, files);
    if (command == "qpt") return cmd_qpt(cfg, opt, meta, files);
    throw ValidationError("unknown command '" + command + "'");
  } catch (const NotConverged& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const FitFailed& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NoRoot& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Pulse design, simulation and tomography for ZZ-coupled transmons"};
  app.name("zzforge");
  std::string command, config_path, decoherence, model, theta = "pi/2";
  std::string axis = "x";
  CliOptions opt;
  std::uint64_t seed = 0;
  long shots = 0;
  std::string out_dir, transition;
  bool perfect_prep = false;

  app.add_option("command", command, "Workflow to run")
      ->required()
      ->check(CLI::IsMember(cli_commands()));
  app.add_option("--config", config_path, "Run configuration (JSON)")->required();
  auto* seed_opt = app.add_option("--seed", seed, "Master seed");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory");
  auto* shots_opt = app.add_option("--shots", shots, "Shots per measurement setting");
  app.add_option("--decoherence", decoherence, "on | off")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--model", model, "logical4 | threelevel")
      ->check(CLI::IsMember({"logical4", "threelevel"}));
  app.add_flag("--perfect-prep", perfect_prep, "Ideal state preparation");
  app.add_option("--gate", opt.gate, "qpt gate: cnot | cz")
      ->check(CLI::IsMember({"cnot", "cz"}));
  app.add_option("--theta", theta, "pulse-tag angle, e.g. pi/2");
  app.add_option("--axis", axis, "pulse-tag axis: x | y")
      ->check(CLI::IsMember({"x", "y"}));
  app.add_option("--qubit", opt.qubit, "pulse-tag qubit: 1 | 2")
      ->check(CLI::Range(1, 2));
  app.add_option("--spectator", opt.spectator, "pulse-tag spectator state: 0 | 1")
      ->check(CLI::Range(0, 1));
  auto* tr_opt = app.add_option("--transition", transition,
                                "00-10 | 01-11 | 00-01 | 10-11");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  try {
    if (*seed_opt) opt.seed = seed;
    if (*out_opt) opt.out = out_dir;
    if (*shots_opt) opt.shots = shots;
    if (!decoherence.empty()) opt.decoherence = decoherence == "on";
    if (!model.empty()) opt.model = model_from_string(model);
    if (perfect_prep) opt.perfect_prep = true;
    if (*tr_opt) opt.transition = transition;
    opt.axis = axis[0];
    opt.theta = parse_angle(theta);
    const RunConfig cfg = parse_config(config_path);
    return dispatch(command, cfg, opt, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace zzforge
