#include "scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qrouter::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError(where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items()) {
    if (!ok.contains(k)) fail(where + "." + k, "unknown key");
  }
}

double number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  return v.get<double>();
}

bool boolean(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(where + "." + key, "expected true or false");
  return v.get<bool>();
}

std::string text(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_string()) fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

Complex complex_value(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  fail(where, "expected a number or [re, im]");
}

Qubit qubit_value(const json& v, const std::string& where) {
  if (v.is_string()) {
    try {
      return Qubit::named(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(where, e.what());
    }
  }
  check_keys(v, where, {"alpha", "beta"});
  if (!v.contains("alpha") || !v.contains("beta")) fail(where, "needs alpha and beta");
  Qubit q{complex_value(v["alpha"], where + ".alpha"), complex_value(v["beta"], where + ".beta")};
  if (!q.is_normalized(1e-9)) fail(where, "|alpha|^2 + |beta|^2 must be 1");
  return q.normalized();
}

void parse_source(const json& s, Scenario& sc) {
  const std::string w = "source";
  check_keys(s, w, {"mu_signal", "p_pair", "pair_rate_hz", "rep_rate_hz", "eta", "calibrate_accidental_fraction",
                    "distinguishable", "multiphoton_noise", "cutoff"});
  auto& p = sc.source;
  if (s.contains("mu_signal")) p.mu_signal = number(s, "mu_signal", w);
  if (s.contains("rep_rate_hz")) p.rep_rate = number(s, "rep_rate_hz", w);
  if (s.contains("p_pair") && s.contains("pair_rate_hz")) fail(w, "give p_pair or pair_rate_hz, not both");
  if (s.contains("p_pair")) p.p_pair = number(s, "p_pair", w);
  if (s.contains("pair_rate_hz")) p.p_pair = SourceParams::pair_probability(number(s, "pair_rate_hz", w), p.rep_rate);
  if (s.contains("eta")) {
    const json& e = s["eta"];
    if (e.is_number()) {
      p.eta = EfficiencyMap::uniform(e.get<double>());
    } else {
      check_keys(e, w + ".eta", {"S", "C1", "C2", "OUT1", "OUT2"});
      if (e.contains("S")) p.eta.signal = number(e, "S", w + ".eta");
      if (e.contains("C1")) p.eta.control1 = number(e, "C1", w + ".eta");
      if (e.contains("C2")) p.eta.control2 = number(e, "C2", w + ".eta");
      if (e.contains("OUT1")) p.eta.out1 = number(e, "OUT1", w + ".eta");
      if (e.contains("OUT2")) p.eta.out2 = number(e, "OUT2", w + ".eta");
    }
  }
  if (s.contains("calibrate_accidental_fraction")) {
    if (s.contains("eta")) fail(w, "eta and calibrate_accidental_fraction are exclusive");
    sc.calibrate_accidental_fraction = number(s, "calibrate_accidental_fraction", w);
    if (!(*sc.calibrate_accidental_fraction > 0.0 && *sc.calibrate_accidental_fraction < 1.0)) {
      fail(w + ".calibrate_accidental_fraction", "must lie in (0, 1)");
    }
  }
  if (s.contains("distinguishable")) p.distinguishable = boolean(s, "distinguishable", w);
  if (s.contains("multiphoton_noise")) p.multiphoton_noise = boolean(s, "multiphoton_noise", w);
  if (s.contains("cutoff")) {
    if (!s["cutoff"].is_number_integer()) fail(w + ".cutoff", "expected an integer");
    p.cutoff = s["cutoff"].get<int>();
  }
  const EfficiencyMap eta = p.eta;
  auto positive = [&](double x, const char* name) {
    if (!(x > 0.0 && x <= 1.0)) fail(w + ".eta." + name, "must lie in (0, 1]");
  };
  positive(eta.signal, "S");
  positive(eta.control1, "C1");
  positive(eta.control2, "C2");
  positive(eta.out1, "OUT1");
  positive(eta.out2, "OUT2");
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    fail(w, e.what());
  }
}

ControlSetting control_value(const json& v, const std::string& where) {
  if (v.is_number()) return ControlSetting::custom(v.get<double>());
  if (v.is_string()) {
    try {
      return ControlSetting::named(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(where, e.what());
    }
  }
  fail(where, "expected \"OFF\", \"ON\", \"BALANCED\" or a phase in radians");
}

void parse_router(const json& r, Scenario& sc) {
  const std::string w = "router";
  check_keys(r, w, {"regime", "variant", "controls", "control2_shift", "output_phase_correction", "bd4_tilt",
                    "coherence_projection"});
  auto& c = sc.router;
  try {
    if (r.contains("regime")) c.regime = parse_regime(text(r, "regime", w));
    if (r.contains("variant")) c.variant = parse_variant(text(r, "variant", w));
  } catch (const std::invalid_argument& e) {
    fail(w, e.what());
  }
  if (r.contains("controls")) {
    const json& cs = r["controls"];
    if (!cs.is_array() || cs.empty()) fail(w + ".controls", "expected a non-empty array");
    sc.controls.clear();
    for (std::size_t i = 0; i < cs.size(); ++i) {
      sc.controls.push_back(control_value(cs[i], w + ".controls[" + std::to_string(i) + "]"));
    }
  }
  if (r.contains("control2_shift")) {
    const std::string s = text(r, "control2_shift", w);
    if (s == "state_preparation") {
      c.control2_shift = Control2Shift::state_preparation;
    } else if (s == "waveplate") {
      c.control2_shift = Control2Shift::waveplate;
    } else {
      fail(w + ".control2_shift", "expected \"state_preparation\" or \"waveplate\"");
    }
  }
  if (r.contains("output_phase_correction")) c.output_phase_correction = boolean(r, "output_phase_correction", w);
  if (r.contains("bd4_tilt")) c.bd4_tilt = number(r, "bd4_tilt", w);
  if (r.contains("coherence_projection")) c.coherence_projection = qubit_value(r["coherence_projection"], w + ".coherence_projection");
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    fail(w, e.what());
  }
}

void parse_signals(const json& s, Scenario& sc) {
  if (!s.is_array() || s.empty()) fail("signals", "expected a non-empty array");
  sc.signals.clear();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::string w = "signals[" + std::to_string(i) + "]";
    const Qubit q = qubit_value(s[i], w);
    sc.signals.push_back({s[i].is_string() ? s[i].get<std::string>() : "custom" + std::to_string(i), q});
  }
}

void parse_run(const json& r, Scenario& sc) {
  const std::string w = "run";
  check_keys(r, w, {"mode", "seed", "duration_s", "interval_s", "projections"});
  auto& run = sc.run;
  if (r.contains("mode")) {
    const std::string m = text(r, "mode", w);
    if (m == "ideal") {
      run.mode = RunMode::ideal;
    } else if (m == "monte_carlo") {
      run.mode = RunMode::monte_carlo;
    } else {
      fail(w + ".mode", "expected \"ideal\" or \"monte_carlo\"");
    }
  }
  if (r.contains("seed")) {
    if (!r["seed"].is_number_unsigned()) fail(w + ".seed", "expected a non-negative integer");
    run.seed = r["seed"].get<std::uint64_t>();
  }
  if (r.contains("duration_s")) run.duration_s = number(r, "duration_s", w);
  if (r.contains("interval_s")) run.interval_s = number(r, "interval_s", w);
  if (!(run.duration_s >= 0.0)) fail(w + ".duration_s", "must be >= 0");
  if (!(run.interval_s >= 0.0)) fail(w + ".interval_s", "must be >= 0");
  if (r.contains("projections")) {
    const std::string p = text(r, "projections", w);
    if (p == "none") {
      run.projections = ProjectionSet::none;
    } else if (p == "fidelity") {
      run.projections = ProjectionSet::fidelity;
    } else {
      fail(w + ".projections", "expected \"none\" or \"fidelity\"");
    }
  }
}

void parse_outputs(const json& o, Scenario& sc) {
  const std::string w = "outputs";
  check_keys(o, w, {"path", "format", "precision"});
  if (o.contains("path")) sc.outputs.path = text(o, "path", w);
  if (o.contains("format")) {
    sc.outputs.format = text(o, "format", w);
    if (sc.outputs.format != "json" && sc.outputs.format != "csv") fail(w + ".format", "expected \"json\" or \"csv\"");
  }
  if (o.contains("precision")) {
    const std::string p = text(o, "precision", w);
    if (p != "full" && p != "6") fail(w + ".precision", "expected \"full\" or \"6\"");
    sc.outputs.full_precision = p == "full";
  }
}

}  // namespace

Scenario default_scenario() {
  Scenario sc;
  for (auto name : kProbeStateNames) sc.signals.push_back({std::string(name), Qubit::named(name)});
  return sc;
}

Scenario parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  check_keys(doc, "scenario", {"source", "router", "signals", "run", "outputs"});
  Scenario sc = default_scenario();
  try {
    if (doc.contains("source")) parse_source(doc["source"], sc);
    if (doc.contains("router")) parse_router(doc["router"], sc);
    if (doc.contains("signals")) parse_signals(doc["signals"], sc);
    if (doc.contains("run")) parse_run(doc["run"], sc);
    if (doc.contains("outputs")) parse_outputs(doc["outputs"], sc);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string() + ": cannot open scenario");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace qrouter::cli
