#include "qrouter/circuit.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <map>
#include <set>
#include <stdexcept>

namespace qrouter {

namespace {

// Unitary on one path taking the polarizer's pass state to H and its
// orthogonal complement to V.
ModeUnitary analyzer_rotation(const std::string& path, const Qubit& pass) {
  Eigen::MatrixXcd r(2, 2);
  r << std::conj(pass.h), std::conj(pass.v), -pass.v, pass.h;
  return ModeUnitary({{path, Polarization::H}, {path, Polarization::V}}, std::move(r));
}

ModeUnitary inverse(const ModeUnitary& u) { return ModeUnitary(u.modes(), u.matrix().adjoint()); }

constexpr double kNegligibleBranch = 1e-14;

}  // namespace

CircuitSpec::CircuitSpec(ModeRegistry registry, std::vector<ElementSpec> elements)
    : registry_(std::move(registry)), elements_(std::move(elements)) {
  for (const auto& e : elements_) {
    for (const auto& p : bound_paths(e)) {
      if (!registry_.contains({p, Polarization::H}) || !registry_.contains({p, Polarization::V})) {
        throw std::invalid_argument("element '" + e.label + "' uses unregistered path '" + p + "'");
      }
    }
  }
}

CircuitSpec CircuitSpec::then(const CircuitSpec& next) const {
  if (!(next.registry_ == registry_)) throw std::invalid_argument("cannot chain circuits over different registries");
  std::vector<ElementSpec> all = elements_;
  all.insert(all.end(), next.elements_.begin(), next.elements_.end());
  return CircuitSpec(registry_, std::move(all));
}

std::optional<std::size_t> CircuitSpec::find(const std::string& label) const {
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i].label == label) return i;
  }
  return std::nullopt;
}

PhotonicState evolve(const PhotonicState& state, const CircuitSpec& circuit) {
  if (!(state.registry() == circuit.registry())) {
    throw std::invalid_argument("state registry does not match the circuit registry");
  }
  PhotonicState s = state;
  for (const auto& e : circuit.elements()) s = apply_unitary(s, compile(e));
  return s;
}

PostselectResult postselect(const PhotonicState& state, const DetectionPattern& pattern) {
  const auto& reg = state.registry();

  struct Resolved {
    std::size_t h = 0, v = 0;
    std::optional<ModeUnitary> rotation;
    DetectorMode mode = DetectorMode::exact_one;
  };
  std::vector<Resolved> resolved;
  std::set<std::string> seen;
  std::vector<bool> monitored(reg.size(), false);

  PhotonicState s = state;
  for (const auto& d : pattern.detectors) {
    if (!seen.insert(d.path).second) throw std::invalid_argument("two detectors on path '" + d.path + "'");
    Resolved r;
    r.h = reg.require({d.path, Polarization::H});
    r.v = reg.require({d.path, Polarization::V});
    r.mode = d.mode;
    monitored[r.h] = true;
    if (d.projection) {
      if (!d.projection->is_normalized()) {
        throw std::invalid_argument("detector projection on '" + d.path + "' is not normalized");
      }
      r.rotation = analyzer_rotation(d.path, *d.projection);
      s = apply_unitary(s, *r.rotation);
    } else {
      monitored[r.v] = true;
    }
    resolved.push_back(std::move(r));
  }
  std::vector<bool> free(reg.size(), false);
  for (const auto& p : pattern.free_paths) {
    free[reg.require({p, Polarization::H})] = true;
    free[reg.require({p, Polarization::V})] = true;
  }

  int absorbed = 0;
  for (const auto& r : resolved) {
    if (r.rotation && r.mode == DetectorMode::exact_one) ++absorbed;
  }

  PhotonicState::Terms kept;
  for (const auto& [occ, amp] : s.terms()) {
    bool ok = true;
    Occupation o = occ;
    for (const auto& r : resolved) {
      const int n = r.rotation ? occ[r.h] : occ[r.h] + occ[r.v];
      const bool fires = r.mode == DetectorMode::exact_one ? n == 1 : n >= 1;
      if (!fires) {
        ok = false;
        break;
      }
      if (r.rotation && r.mode == DetectorMode::exact_one) o[r.h] = 0;
    }
    if (ok && pattern.vacuum_elsewhere) {
      for (std::size_t i = 0; i < reg.size(); ++i) {
        if (!monitored[i] && !free[i] && occ[i] != 0) {
          ok = false;
          break;
        }
      }
    }
    if (ok) kept.emplace(std::move(o), amp);
  }

  PhotonicState conditional(reg, state.photon_number() - absorbed, std::move(kept), state.cutoff());
  for (const auto& r : resolved) {
    if (r.rotation) conditional = apply_unitary(conditional, inverse(*r.rotation));
  }
  const double p = conditional.squared_norm();
  if (p > 0.0) conditional = conditional.normalized();
  return {std::move(conditional), p};
}

FeedForwardResult feed_forward(const PhotonicState& state, std::span<const HeraldBranch> branches) {
  FeedForwardResult out;
  double total = 0.0;
  const PhotonicState* reference = nullptr;
  for (const auto& b : branches) {
    PostselectResult heralded = postselect(state, b.herald);
    BranchOutcome bo{b.label, 0.0, heralded.state};
    if (heralded.probability > 0.0) {
      PhotonicState evolved = evolve(heralded.state, b.continuation);
      if (b.acceptance) {
        PostselectResult accepted = postselect(evolved, *b.acceptance);
        bo.probability = heralded.probability * accepted.probability;
        bo.state = std::move(accepted.state);
      } else {
        bo.probability = heralded.probability;
        bo.state = std::move(evolved);
      }
    }
    total += bo.probability;
    out.branches.push_back(std::move(bo));
  }
  for (const auto& bo : out.branches) {
    if (bo.probability <= kNegligibleBranch) continue;
    if (reference == nullptr) {
      reference = &bo.state;
      continue;
    }
    double mismatch = 1.0;
    if (bo.state.registry() == reference->registry() && bo.state.photon_number() == reference->photon_number()) {
      mismatch = phase_insensitive_distance(*reference, bo.state);
    }
    out.max_mismatch = std::max(out.max_mismatch, mismatch);
  }
  out.consistent = out.max_mismatch < kBranchConsistencyTolerance;
  if (reference != nullptr) {
    out.combined = {*reference, total};
  } else {
    out.combined = {out.branches.empty() ? state.scaled(0.0) : out.branches.front().state.scaled(0.0), total};
  }
  return out;
}

// ---------------------------------------------------------------------------

Qubit control_qubit(double phi) {
  const double r = 1.0 / std::sqrt(2.0);
  return {r, std::polar(r, phi)};
}

std::vector<ElementSpec> ppg_elements(const std::string& signal_path, const std::string& control_path,
                                      const std::string& label_suffix) {
  return {
      {"PBS" + label_suffix, PolarizingBeamSplitter{signal_path, control_path}},
      {"HWP_C" + label_suffix,
       WavePlate{control_path, WavePlateSetting(PlateKind::half, kControlPlateAngle)}},
  };
}

namespace {

void require_single_photon_on(const PhotonicState& s, const std::string& path, const char* what) {
  if (s.photon_number() != 1 || s.empty()) {
    throw std::invalid_argument(std::string(what) + " must hold exactly one photon");
  }
  const auto& reg = s.registry();
  for (const auto& [occ, amp] : s.terms()) {
    for (std::size_t i = 0; i < occ.size(); ++i) {
      if (occ[i] != 0 && reg[i].path != path) {
        throw std::invalid_argument(std::string(what) + " photon found outside path '" + path + "'");
      }
    }
  }
}

}  // namespace

PostselectResult ppg(const PhotonicState& signal, const PhotonicState& control, const PpgSpec& spec) {
  if (control.photon_number() == 0 || control.empty()) {
    throw std::invalid_argument("programmable phase gate is missing its control photon");
  }
  require_single_photon_on(signal, spec.signal_path, "signal");
  require_single_photon_on(control, spec.control_path, "control");

  PhotonicState joint = tensor(signal, control);
  CircuitSpec gate(joint.registry(), ppg_elements(spec.signal_path, spec.control_path, ""));
  PhotonicState evolved = evolve(joint, gate);

  DetectionPattern keep_signal{{}, true, {spec.signal_path}};
  CircuitSpec none(joint.registry(), {});
  std::vector<HeraldBranch> branches{
      {"H", {{{spec.control_path, Qubit::H(), DetectorMode::exact_one}}, false, {}}, none, keep_signal},
  };
  if (spec.regime == PpgRegime::feedforward_half) {
    CircuitSpec flip(joint.registry(), {{"FF", PhaseShifter{spec.signal_path, Polarization::V, std::numbers::pi}}});
    branches.push_back({"V", {{{spec.control_path, Qubit::V(), DetectorMode::exact_one}}, false, {}}, flip, keep_signal});
  }
  FeedForwardResult ff = feed_forward(evolved, branches);
  if (!ff.consistent) throw std::logic_error("phase gate feed-forward branches disagree");

  const ModeRegistry signal_modes = ModeRegistry::from_paths({spec.signal_path});
  if (ff.combined.probability == 0.0) {
    return {PhotonicState(signal_modes, 1, {}), 0.0};
  }
  return {ff.combined.state.restricted_to(signal_modes), ff.combined.probability};
}

PostselectResult ppg(const PhotonicState& signal, const PpgSpec& spec) {
  return ppg(signal, PhotonicState::single_photon(spec.control_path, control_qubit(spec.phi)), spec);
}

// ---------------------------------------------------------------------------

std::vector<double> single_photon_detection(const PhotonicState& photon, const CircuitSpec& circuit,
                                            std::span<const Detector> detectors) {
  if (photon.photon_number() != 1) throw std::invalid_argument("single_photon_detection expects one photon");
  PhotonicState out = evolve(photon, circuit);
  const auto& reg = out.registry();
  std::map<std::string, Qubit> per_path;
  for (const auto& [occ, amp] : out.terms()) {
    for (std::size_t i = 0; i < occ.size(); ++i) {
      if (occ[i] == 0) continue;
      auto [it, inserted] = per_path.try_emplace(reg[i].path, Qubit{0.0, 0.0});
      (reg[i].polarization == Polarization::H ? it->second.h : it->second.v) += amp;
    }
  }
  std::vector<double> q;
  q.reserve(detectors.size());
  for (const auto& d : detectors) {
    reg.require({d.path, Polarization::H});
    auto it = per_path.find(d.path);
    if (it == per_path.end()) {
      q.push_back(0.0);
    } else if (d.projection) {
      q.push_back(std::norm(overlap(*d.projection, it->second)));
    } else {
      q.push_back(it->second.squared_norm());
    }
  }
  return q;
}

double all_detectors_fire(std::span<const PhotonGroup> groups) {
  std::size_t n_det = 0;
  for (const auto& g : groups) n_det = std::max(n_det, g.q.size());
  if (n_det > 16) throw std::invalid_argument("too many detectors for inclusion-exclusion");
  double total = 0.0;
  for (std::uint32_t subset = 0; subset < (1u << n_det); ++subset) {
    double prod = 1.0;
    for (const auto& g : groups) {
      double hit = 0.0;
      for (std::size_t d = 0; d < g.q.size(); ++d) {
        if (subset & (1u << d)) hit += g.q[d];
      }
      prod *= std::pow(std::max(0.0, 1.0 - hit), g.count);
    }
    total += (std::popcount(subset) % 2 == 0 ? 1.0 : -1.0) * prod;
  }
  return std::max(0.0, total);
}

}  // namespace qrouter
