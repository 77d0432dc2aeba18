#include "qrouter/router.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace qrouter {

namespace {

using namespace std::complex_literals;
using namespace paths;
constexpr double kPi = std::numbers::pi;

ModeRegistry router_registry() {
  return ModeRegistry::from_paths({kSignalIn, kControl1, kControl2, kS1, kS2, kA1, kA2, kB1, kB2, kOut1, kOut2});
}

ElementSpec hwp(std::string label, const std::string& path, double degrees) {
  return {std::move(label), WavePlate{path, WavePlateSetting::half_wave_deg(degrees)}};
}

std::vector<ElementSpec> recombination(const RouterConfig& c) {
  std::vector<ElementSpec> e{
      {"HG3", HadamardPlate{kS1}},
      {"HG4", HadamardPlate{kS2}},
      {"BD2_S1", BeamDisplacer{kS1, kA1, kA2}},
      {"BD2_S2", BeamDisplacer{kS2, kB1, kB2}},
  };
  if (c.variant == RouterVariant::full) {
    e.push_back({"M1", Mirror{kB2}});
    e.push_back({"BD3", BeamDisplacer{kOut1, kA1, kB2}});
    e.push_back(hwp("HWP_A2", kA2, 45.0));
    e.push_back(hwp("HWP_B1", kB1, 45.0));
    e.push_back({"BD4", BeamDisplacer{kOut2, kA2, kB1}});
  } else {
    e.push_back({"A1_TEST_PATH", PathSwap{kA1, kB1}});
    e.push_back(hwp("HWP_A2", kA2, 45.0));
    e.push_back(hwp("HWP_B1", kB1, 45.0));
    e.push_back({"BD4_TILT", PhaseShifter{kA2, Polarization::H, c.bd4_tilt}});
    e.push_back({"BD4", BeamDisplacer{kOut1, kA2, kB1}});
  }
  return e;
}

std::vector<ElementSpec> output_stage(const RouterConfig& c, bool swap_ports) {
  std::vector<ElementSpec> e;
  if (swap_ports) e.push_back({"FIBER_SWITCH", PathSwap{kOut1, kOut2}});
  if (c.output_phase_correction && c.variant == RouterVariant::full) {
    e.push_back({"PS_OUT2_H", PhaseShifter{kOut2, Polarization::H, kPi / 2}});
    e.push_back({"PS_OUT2_V", PhaseShifter{kOut2, Polarization::V, kPi / 2}});
  }
  return e;
}

DetectionPattern herald(const Qubit& c1, const Qubit& c2) {
  return {{{kControl1, c1, DetectorMode::exact_one}, {kControl2, c2, DetectorMode::exact_one}}, false, {}};
}

HeraldBranch branch(const RouterConfig& c, const ModeRegistry& reg, std::string label, const Qubit& c1,
                    const Qubit& c2, bool flip_s1, bool flip_s2, bool swap_ports) {
  std::vector<ElementSpec> e;
  if (flip_s1) e.push_back({"FF_S1", PhaseShifter{kS1, Polarization::V, kPi}});
  if (flip_s2) e.push_back({"FF_S2", PhaseShifter{kS2, Polarization::V, kPi}});
  for (auto& x : recombination(c)) e.push_back(std::move(x));
  for (auto& x : output_stage(c, swap_ports)) e.push_back(std::move(x));
  return {std::move(label), herald(c1, c2), CircuitSpec(reg, std::move(e)), std::nullopt};
}

DetectionPattern signal_outputs() { return {{}, true, {kOut1, kOut2}}; }

DetectionPattern port_pattern(const std::string& port, const std::optional<Qubit>& projection) {
  return {{{port, projection, DetectorMode::exact_one}}, true, {}};
}

std::vector<HeraldBranch> with_acceptance(const std::vector<HeraldBranch>& branches, const DetectionPattern& p) {
  std::vector<HeraldBranch> out = branches;
  for (auto& b : out) b.acceptance = p;
  return out;
}

void require_normalized(const Qubit& signal) {
  if (!signal.is_normalized()) throw std::invalid_argument("signal qubit must satisfy |alpha|^2 + |beta|^2 = 1");
}

Qubit port_qubit(const PhotonicState& s, const std::string& port) {
  const auto& reg = s.registry();
  const std::size_t h = reg.require({port, Polarization::H});
  const std::size_t v = reg.require({port, Polarization::V});
  Qubit q{0.0, 0.0};
  for (const auto& [occ, amp] : s.terms()) {
    if (occ[h] == 1) q.h += amp;
    if (occ[v] == 1) q.v += amp;
  }
  return q;
}

// Bucket-detector three-fold probability for distinguishable photons, summed
// over the accepted herald outcomes.
double distinguishable_coincidence(const RouterCircuit& rc, const Qubit& signal, const std::string& port,
                                   const std::optional<Qubit>& projection) {
  const PhotonicState photons[] = {
      PhotonicState::single_photon(kSignalIn, signal).extended_to(rc.registry),
      PhotonicState::single_photon(kControl1, rc.control1).extended_to(rc.registry),
      PhotonicState::single_photon(kControl2, rc.control2).extended_to(rc.registry),
  };
  double total = 0.0;
  for (const auto& b : rc.branches) {
    std::vector<Detector> detectors = b.herald.detectors;
    for (auto& d : detectors) d.mode = DetectorMode::threshold;
    detectors.push_back({port, projection, DetectorMode::threshold});
    const CircuitSpec whole = rc.preparation.then(b.continuation);
    std::vector<PhotonGroup> groups;
    for (const auto& p : photons) groups.push_back({single_photon_detection(p, whole, detectors), 1});
    total += all_detectors_fire(groups);
  }
  return total;
}

}  // namespace

ControlSetting ControlSetting::named(std::string_view name) {
  if (name == "OFF") return off();
  if (name == "ON") return on();
  if (name == "BALANCED") return balanced();
  throw std::invalid_argument("unknown control setting '" + std::string(name) + "' (expected OFF, ON or BALANCED)");
}

std::string ControlSetting::label() const {
  if (name) {
    switch (*name) {
      case ControlName::off: return "OFF";
      case ControlName::on: return "ON";
      case ControlName::balanced: return "BALANCED";
    }
  }
  return fmt::format("phi={:.6g}", phi);
}

std::string_view to_string(RouterRegime r) {
  switch (r) {
    case RouterRegime::basic_1_16: return "basic_1_16";
    case RouterRegime::swap_1_8: return "swap_1_8";
    case RouterRegime::feedforward_1_4: return "feedforward_1_4";
  }
  return "?";
}

std::string_view to_string(RouterVariant v) {
  return v == RouterVariant::full ? "full" : "coherence_test";
}

RouterRegime parse_regime(std::string_view s) {
  if (s == "basic_1_16") return RouterRegime::basic_1_16;
  if (s == "swap_1_8") return RouterRegime::swap_1_8;
  if (s == "feedforward_1_4") return RouterRegime::feedforward_1_4;
  throw std::invalid_argument("unknown regime '" + std::string(s) + "'");
}

RouterVariant parse_variant(std::string_view s) {
  if (s == "full") return RouterVariant::full;
  if (s == "coherence_test") return RouterVariant::coherence_test;
  throw std::invalid_argument("unknown router variant '" + std::string(s) + "'");
}

void RouterConfig::validate() const {
  if (variant == RouterVariant::coherence_test && regime == RouterRegime::swap_1_8) {
    throw std::invalid_argument("the coherence test has a single monitored port; the port-swap regime does not apply");
  }
  if (!coherence_projection.is_normalized()) throw std::invalid_argument("coherence projection must be normalized");
  if (!std::isfinite(control.phi) || !std::isfinite(bd4_tilt)) throw std::invalid_argument("phases must be finite");
}

PhotonicState RouterCircuit::input(const Qubit& signal) const {
  PhotonicState s = tensor(tensor(PhotonicState::single_photon(paths::kSignalIn, signal),
                                  PhotonicState::single_photon(paths::kControl1, control1)),
                           PhotonicState::single_photon(paths::kControl2, control2));
  return s.extended_to(registry);
}

RouterCircuit build_router(const RouterConfig& config) {
  config.validate();
  RouterCircuit rc;
  rc.config = config;
  rc.registry = router_registry();
  const double phi = config.control.phi;
  rc.control1 = control_qubit(phi);

  std::vector<ElementSpec> prep;
  if (config.control2_shift == Control2Shift::state_preparation) {
    rc.control2 = control_qubit(phi + kPi);
  } else {
    rc.control2 = control_qubit(phi);
    prep.push_back(hwp("HWP_C2_PREP", kControl2, 0.0));
  }
  prep.push_back({"BD1", BeamDisplacer{kSignalIn, kS1, kS2}});
  prep.push_back(hwp("HWP_S2", kS2, 45.0));
  prep.push_back({"HG1", HadamardPlate{kS1}});
  prep.push_back({"HG2", HadamardPlate{kS2}});
  for (auto& e : ppg_elements(kS1, kControl1, "1")) prep.push_back(std::move(e));
  for (auto& e : ppg_elements(kS2, kControl2, "2")) prep.push_back(std::move(e));
  rc.preparation = CircuitSpec(rc.registry, std::move(prep));

  const Qubit H = Qubit::H();
  const Qubit V = Qubit::V();
  rc.branches.push_back(branch(config, rc.registry, "HH", H, H, false, false, false));
  switch (config.regime) {
    case RouterRegime::basic_1_16:
      break;
    case RouterRegime::swap_1_8:
      rc.branches.push_back(branch(config, rc.registry, "VV", V, V, false, false, true));
      break;
    case RouterRegime::feedforward_1_4:
      rc.branches.push_back(branch(config, rc.registry, "HV", H, V, false, true, false));
      rc.branches.push_back(branch(config, rc.registry, "VH", V, H, true, false, false));
      rc.branches.push_back(branch(config, rc.registry, "VV", V, V, true, true, false));
      break;
  }
  return rc;
}

RouterResult run_router(const Qubit& signal, const RouterConfig& config) {
  require_normalized(signal);
  const RouterCircuit rc = build_router(config);
  const PhotonicState evolved = evolve(rc.input(signal), rc.preparation);
  const auto branches = with_acceptance(rc.branches, signal_outputs());
  FeedForwardResult ff = feed_forward(evolved, branches);
  if (!ff.consistent) {
    throw std::logic_error(fmt::format("router branches disagree (mismatch {:.3g})", ff.max_mismatch));
  }

  RouterResult r;
  const double phi = config.control.phi;
  r.c1 = std::cos(phi / 2.0);
  r.c2 = -1i * std::sin(phi / 2.0);
  r.success_probability = ff.combined.probability;
  r.branches = std::move(ff.branches);
  const ModeRegistry outputs = ModeRegistry::from_paths({kOut1, kOut2});
  if (r.success_probability == 0.0) {
    r.output = PhotonicState(outputs, 1, {});
    return r;
  }
  r.output = ff.combined.state.restricted_to(outputs);
  const Qubit q1 = port_qubit(r.output, kOut1);
  const Qubit q2 = port_qubit(r.output, kOut2);
  r.p1 = q1.squared_norm();
  r.p2 = q2.squared_norm();
  if (r.p1 > 0.0) r.out1_qubit = q1.normalized();
  if (r.p2 > 0.0) r.out2_qubit = q2.normalized();
  return r;
}

PhotonicState analytic_output(const Qubit& signal, double phi) {
  const Complex c = std::cos(phi / 2.0);
  const Complex s = -1i * std::sin(phi / 2.0);
  // Registry order: OUT1/H, OUT1/V, OUT2/H, OUT2/V.
  PhotonicState::Terms t;
  t[{1, 0, 0, 0}] = c * signal.h;
  t[{0, 1, 0, 0}] = c * signal.v;
  t[{0, 0, 1, 0}] = s * signal.h;
  t[{0, 0, 0, 1}] = s * signal.v;
  return PhotonicState(ModeRegistry::from_paths({kOut1, kOut2}), 1, std::move(t));
}

PhotonicState analytic_intermediate(const Qubit& signal, double phi) {
  const double r = 1.0 / std::sqrt(2.0);
  const Complex e = std::polar(1.0, phi);
  PhotonicState::Terms t;
  t[{1, 0, 0, 0}] = r * signal.h;
  t[{0, 1, 0, 0}] = r * signal.h * e;
  t[{0, 0, 1, 0}] = r * signal.v;
  t[{0, 0, 0, 1}] = -r * signal.v * e;
  return PhotonicState(ModeRegistry::from_paths({kS1, kS2}), 1, std::move(t));
}

PhotonicState intermediate_state_check(const Qubit& signal, double phi) {
  require_normalized(signal);
  RouterConfig config;
  config.control = ControlSetting::custom(phi);
  const RouterCircuit rc = build_router(config);
  const PhotonicState evolved = evolve(rc.input(signal), rc.preparation);
  DetectionPattern pattern = rc.branches.front().herald;
  pattern.vacuum_elsewhere = true;
  pattern.free_paths = {kS1, kS2};
  const PostselectResult ps = postselect(evolved, pattern);
  return ps.state.restricted_to(ModeRegistry::from_paths({kS1, kS2}));
}

std::array<double, 2> coincidence_probabilities(const Qubit& signal, const RouterConfig& config,
                                                const PortProjections& projections, bool distinguishable) {
  require_normalized(signal);
  const RouterCircuit rc = build_router(config);
  const std::string ports[2] = {kOut1, kOut2};
  const std::optional<Qubit> proj[2] = {projections.out1, projections.out2};
  std::array<double, 2> out{0.0, 0.0};
  if (distinguishable) {
    for (int k = 0; k < 2; ++k) out[k] = distinguishable_coincidence(rc, signal, ports[k], proj[k]);
    return out;
  }
  const PhotonicState evolved = evolve(rc.input(signal), rc.preparation);
  for (int k = 0; k < 2; ++k) {
    const auto branches = with_acceptance(rc.branches, port_pattern(ports[k], proj[k]));
    out[k] = feed_forward(evolved, branches).combined.probability;
  }
  return out;
}

std::vector<FringeSample> coherence_scan(const Qubit& signal, const RouterConfig& config,
                                         std::span<const double> bd4_phases, bool distinguishable) {
  if (config.variant != RouterVariant::coherence_test) {
    throw std::invalid_argument("coherence_scan needs the coherence-test variant (M1 and BD3 removed)");
  }
  std::vector<FringeSample> out;
  out.reserve(bd4_phases.size());
  for (double theta : bd4_phases) {
    RouterConfig c = config;
    c.bd4_tilt = theta;
    const auto p = coincidence_probabilities(signal, c, {c.coherence_projection, std::nullopt}, distinguishable);
    out.push_back({theta, p[0]});
  }
  return out;
}

}  // namespace qrouter
