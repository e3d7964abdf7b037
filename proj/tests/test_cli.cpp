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

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "zzforge/cli.hpp"

using namespace zzforge;
namespace fs = std::filesystem;

namespace {

const std::string kDefault = ZZFORGE_DEFAULT_CONFIG;

struct Run {
  int code = -1;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "zzforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// Fresh, empty scratch directory per case.
fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("zzforge_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write_config(const fs::path& dir, const nlohmann::json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

nlohmann::json default_json() { return nlohmann::json::parse(slurp(kDefault)); }

// A small but complete sampled workload.
RunConfig small_config() {
  RunConfig c = parse_config(kDefault);
  c.experiment.shots = 200;
  c.experiment.rb_pi2_sequences = 1;
  c.experiment.rb_pi_sequences = 1;
  c.experiment.rb_max_pairs = 8;
  c.experiment.rb_stride = 2;
  return c;
}

}  // namespace

TEST_CASE("default config parses and carries the measured device") {
  const RunConfig c = parse_config(kDefault);
  CHECK_NOTHROW(validate(c));
  REQUIRE(c.device.transitions.has_value());
  CHECK(c.device.transitions->t00_10 == doctest::Approx(5.07478658e9));
  CHECK(c.coherence.t1_s[0] == doctest::Approx(76.98e-6));
  CHECK(c.coherence.t2star_s[1] == doctest::Approx(17.09e-6));
  CHECK(c.experiment.seed == 12345u);

  const DerivedDevice d = derive_device(c);
  CHECK(d.spectrum.zz_branch_qubit1() / kTwoPi / 1e6 == doctest::Approx(9.282).epsilon(1e-3));
  CHECK(d.spectrum.zz_branch_qubit2() / kTwoPi / 1e6 == doctest::Approx(9.300).epsilon(1e-3));
  CHECK(d.model.params.gz / kTwoPi / 1e6 == doctest::Approx(9.291).epsilon(1e-3));
  REQUIRE(d.calibration.has_value());
}

TEST_CASE("validation collects physicality violations") {
  RunConfig c = parse_config(kDefault);
  c.coherence.t2star_s[1] = 2.5 * c.coherence.t1_s[1];
  CHECK_THROWS_AS(validate(c), ValidationError);
  c.coherence.t2star_s[0] = -1.0;
  try {
    validate(c);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("qubit1") != std::string::npos);
    CHECK(msg.find("qubit2") != std::string::npos);
  }

  auto j = default_json();
  j["coherence"]["qubit1"]["T2star"] = "200 us";
  CHECK_THROWS_AS(parse_config_text(j.dump()), ValidationError);
}

TEST_CASE("emit then parse is the identity") {
  const RunConfig a = parse_config(kDefault);
  const RunConfig b = parse_config_text(emit_config(a));
  CHECK(a == b);
  CHECK(emit_config(b) == emit_config(a));
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);

  RunConfig bare = a;
  bare.device.transitions.reset();
  bare.device.calibrate = false;
  BareSection s;
  s.q1 = {5.1e9, -0.26e9};
  s.q2 = {5.3e9, -0.35e9};
  s.g1_hz = 12.5e6;
  bare.device.bare = s;
  bare.experiment.seed.reset();
  bare.coherence.enabled = false;
  const RunConfig back = parse_config_text(emit_config(bare));
  CHECK(back == bare);
  CHECK(config_hash(back) != config_hash(a));
}

TEST_CASE("parse errors: unknown keys, units and structure") {
  auto j = default_json();
  j["simulation"]["steps_per_ns"] = 10;
  CHECK_THROWS_AS(parse_config_text(j.dump()), ParseError);

  j = default_json();
  j["device"]["transitions"]["00-10"] = "5.07478658";
  CHECK_THROWS_AS(parse_config_text(j.dump()), ParseError);

  j = default_json();
  j["coherence"]["qubit1"]["T1"] = "76.98 GHz";
  CHECK_THROWS_AS(parse_config_text(j.dump()), ParseError);

  CHECK_THROWS_AS(parse_config_text("{ \"device\": "), ParseError);
  CHECK_THROWS_AS(parse_config("/nonexistent/zzforge.json"), ParseError);

  // Exactly one of bare or transitions.
  j = default_json();
  j["device"]["bare"] = {{"qubit1", {{"omega01", "5 GHz"}, {"anharmonicity", "-300 MHz"}}},
                         {"qubit2", {{"omega01", "5.3 GHz"}, {"anharmonicity", "-300 MHz"}}},
                         {"g1", "10 MHz"}};
  CHECK_THROWS(parse_config_text(j.dump()));
}

TEST_CASE("parse_quantity units") {
  CHECK(parse_quantity("5.075 GHz", "k", true) == doctest::Approx(5.075e9));
  CHECK(parse_quantity("9.29 MHz", "k", true) == doctest::Approx(9.29e6));
  CHECK(parse_quantity("12 kHz", "k", true) == doctest::Approx(12e3));
  CHECK(parse_quantity("53.8 ns", "k", false) == doctest::Approx(53.8e-9));
  CHECK(parse_quantity("17.09 us", "k", false) == doctest::Approx(17.09e-6));
  CHECK(parse_quantity("1 s", "k", false) == 1.0);
  CHECK_THROWS_AS(parse_quantity("53.8", "k", false), ParseError);
  CHECK_THROWS_AS(parse_quantity("53.8 ns", "k", true), ParseError);
  CHECK_THROWS_AS(parse_quantity("GHz", "k", true), ParseError);
  CHECK(parse_quantity(format_hz(5.07478658e9), "k", true) == 5.07478658e9);
  CHECK(parse_quantity(format_seconds(17.09e-6), "k", false) == 17.09e-6);
}

TEST_CASE("parse_angle and format_number") {
  CHECK(parse_angle("pi") == doctest::Approx(kPi));
  CHECK(parse_angle("pi/2") == doctest::Approx(kPi / 2));
  CHECK(parse_angle("-pi/2") == doctest::Approx(-kPi / 2));
  CHECK(parse_angle("3*pi/4") == doctest::Approx(0.75 * kPi));
  CHECK(parse_angle("0.25") == 0.25);
  CHECK_THROWS_AS(parse_angle("pi|2"), ValidationError);
  CHECK_THROWS_AS(parse_angle("half"), ValidationError);
  for (double x : {0.1, -2.5e-9, 5.07478658e9, 1.0 / 3.0})
    CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("write_atomic replaces the file and leaves no temporary") {
  const fs::path d = scratch("atomic");
  const fs::path p = d / "sub" / "a.txt";
  write_atomic(p, "first");
  write_atomic(p, "second");
  CHECK(slurp(p) == "second");
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(p.parent_path())) ++files;
  CHECK(files == 1);
}

TEST_CASE("exit codes on malformed inputs") {
  const fs::path d = scratch("exit");
  const std::string out = (d / "o").string();

  CHECK(run({"--help"}).code == 0);
  CHECK(run({"derive"}).code == 1);                                   // no --config
  CHECK(run({"frobnicate", "--config", kDefault}).code == 1);         // unknown command
  CHECK(run({"derive", "--config", (d / "missing.json").string()}).code == 1);
  CHECK(run({"derive", "--config", kDefault, "--bogus"}).code == 1);  // unknown flag
  CHECK(run({"derive", "--config", kDefault, "--decoherence", "maybe"}).code == 1);
  CHECK(run({"rb", "--config", kDefault, "--model", "threelevel", "--out", out}).code == 1);
  CHECK(run({"pulse-tag", "--config", kDefault, "--theta", "x", "--out", out}).code == 1);

  auto j = default_json();
  j["experiment"]["colour"] = "blue";
  const Run bad_key = run({"derive", "--config", write_config(d, j).string()});
  CHECK(bad_key.code == 1);
  CHECK(bad_key.err.find("experiment.colour") != std::string::npos);

  j = default_json();
  j["experiment"].erase("seed");
  const std::string no_seed = write_config(d, j).string();
  const Run rb = run({"rb", "--config", no_seed, "--out", out});
  CHECK(rb.code == 1);
  CHECK(rb.err.find("seed") != std::string::npos);
  CHECK(run({"qst", "--config", no_seed, "--out", out}).code == 1);
  CHECK(run({"qpt", "--config", no_seed, "--out", out}).code == 1);

  // Unsatisfiable convergence tolerance.
  j = default_json();
  j["simulation"]["tolerance"] = 1e-300;
  const Run nc = run({"sim-cnot", "--config", write_config(d, j).string(),
                      "--decoherence", "off", "--out", out});
  CHECK(nc.code == 2);
  CHECK(nc.err.find("halving") != std::string::npos);
}

TEST_CASE("derive and pulse artifacts") {
  const fs::path d = scratch("pulse");
  REQUIRE(run({"derive", "--config", kDefault, "--out", d.string()}).code == 0);
  const auto dj = read_json(d / "derive.json");
  CHECK(dj["params"]["gz_hz"].get<double>() / 1e6 == doctest::Approx(9.291).epsilon(1e-3));
  CHECK(dj["cz_gate_time_s"].get<double>() * 1e9 == doctest::Approx(53.8).epsilon(2e-3));

  REQUIRE(run({"pulse-swipht", "--config", kDefault, "--out", d.string()}).code == 0);
  const auto sj = read_json(d / "swipht_params.json");
  CHECK(sj["duration_s"].get<double>() * 1e9 == doctest::Approx(100.6).epsilon(1e-3));
  CHECK(sj["max_chi_dot_over_gz"].get<double>() <= 0.5);
  const std::string csv = slurp(d / "swipht_waveform.csv");
  CHECK(csv.rfind("time_s,envelope_re_rad_per_s,envelope_im_rad_per_s,config_hash,seed\r\n", 0) == 0);
  std::size_t rows = 0;
  for (char ch : csv) rows += ch == '\n';
  CHECK(rows == 4096 + 1);

  REQUIRE(run({"pulse-tag", "--config", kDefault, "--theta", "pi", "--transition", "01-11",
               "--out", d.string()}).code == 0);
  const auto tj = read_json(d / "tag_params.json");
  CHECK(tj["qubit"] == 1);
  CHECK(tj["spectator_state"] == 1);
  CHECK(tj["theta_rad"].get<double>() == doctest::Approx(kPi));
  for (const char* k : {"c1", "c2", "c3", "c4"})
    CHECK(std::abs(tj["residuals_rad"][k].get<double>()) < 1e-9);
  CHECK(fs::exists(d / "tag_waveform.csv"));
}

TEST_CASE("sim-cz without decoherence reports unit fidelity") {
  const fs::path d = scratch("simcz");
  REQUIRE(run({"sim-cz", "--config", kDefault, "--decoherence", "off", "--out", d.string()})
              .code == 0);
  const auto rep = read_json(d / "sim_cz_report.json");
  CHECK(rep["average_gate_fidelity"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep["decoherence"] == false);
  CHECK(rep["duration_s"].get<double>() * 1e9 == doctest::Approx(53.8).epsilon(2e-3));
  CHECK(fs::exists(d / "sim_cz_process.json"));
  CHECK(!fs::exists(d / "sim_cz_leakage.json"));

  REQUIRE(run({"sim-cz", "--config", kDefault, "--out", d.string()}).code == 0);
  const auto noisy = read_json(d / "sim_cz_report.json");
  CHECK(noisy["average_gate_fidelity"].get<double>() < 0.9999);
  CHECK(noisy["average_gate_fidelity"].get<double>() > 0.99);
}

TEST_CASE("sim-cnot on the three-level model writes a leakage report") {
  const fs::path d = scratch("simcnot");
  REQUIRE(run({"sim-cnot", "--config", kDefault, "--model", "threelevel", "--decoherence", "off",
               "--out", d.string()}).code == 0);
  const auto lk = read_json(d / "sim_cnot_leakage.json");
  CHECK(lk["leakage"].get<double>() >= 0.0);
  CHECK(lk["leakage"].get<double>() < 5e-2);
  const auto rep = read_json(d / "sim_cnot_report.json");
  CHECK(rep["model"] == "threelevel");
}

TEST_CASE("sampled workflows are byte-reproducible and tagged") {
  RunConfig cfg = small_config();
  const std::string hash = config_hash(cfg);
  for (const std::string cmd : {"rb", "qst"}) {
    CAPTURE(cmd);
    const fs::path a = scratch(cmd + "_a"), b = scratch(cmd + "_b"), c = scratch(cmd + "_c");
    std::ostringstream log, err;
    CliOptions opt;
    opt.out = a.string();
    REQUIRE(dispatch(cmd, cfg, opt, log, err) == 0);
    opt.out = b.string();
    REQUIRE(dispatch(cmd, cfg, opt, log, err) == 0);
    opt.out = c.string();
    opt.seed = 999;
    REQUIRE(dispatch(cmd, cfg, opt, log, err) == 0);

    int compared = 0;
    bool any_differs = false;
    for (const auto& e : fs::directory_iterator(a)) {
      const std::string name = e.path().filename().string();
      const std::string x = slurp(e.path());
      CHECK(x == slurp(b / name));
      any_differs = any_differs || x != slurp(c / name);
      CHECK(x.find("config_hash") != std::string::npos);
      CHECK(x.find(hash) != std::string::npos);
      CHECK(x.find("12345") != std::string::npos);
      ++compared;
    }
    CHECK(compared >= 2);
    CHECK(any_differs);
  }
}
