#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qrouter/elements.hpp"
#include "qrouter/fock.hpp"

namespace qrouter {

/// Ordered element list over a fixed mode registry.
class CircuitSpec {
 public:
  CircuitSpec() = default;
  /// Throws std::invalid_argument if an element touches a path without both
  /// polarization modes registered.
  CircuitSpec(ModeRegistry registry, std::vector<ElementSpec> elements);

  const ModeRegistry& registry() const { return registry_; }
  const std::vector<ElementSpec>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }

  /// This circuit followed by `next` (same registry).
  CircuitSpec then(const CircuitSpec& next) const;
  /// Index of the first element with this label, if any.
  std::optional<std::size_t> find(const std::string& label) const;

 private:
  ModeRegistry registry_;
  std::vector<ElementSpec> elements_;
};

/// Applies every element in order. The state must live on the circuit's registry.
PhotonicState evolve(const PhotonicState& state, const CircuitSpec& circuit);

enum class DetectorMode {
  exact_one,  ///< photon-number resolving, exactly one photon
  threshold,  ///< bucket detector, at least one photon
};

struct Detector {
  std::string path;
  /// Polarizer in front of the detector; nullopt detects both polarizations.
  std::optional<Qubit> projection;
  DetectorMode mode = DetectorMode::exact_one;
};

/// A coincidence event. With `vacuum_elsewhere`, every mode not monitored by a
/// detector and not on a `free_paths` entry must be empty; the light rejected
/// by a detector's polarizer counts as unmonitored.
struct DetectionPattern {
  std::vector<Detector> detectors;
  bool vacuum_elsewhere = false;
  std::vector<std::string> free_paths;
};

/// Conditional state after a detection event. `state` is normalized when
/// probability > 0 and is the zero vector otherwise.
///
/// A detector with a polarizer in exact_one mode absorbs its photon, so the
/// conditional state has one photon fewer. Detectors without a polarizer,
/// and threshold detectors, project onto the firing subspace and keep the
/// photons in the state.
struct PostselectResult {
  PhotonicState state;
  double probability = 0.0;
};

PostselectResult postselect(const PhotonicState& state, const DetectionPattern& pattern);

/// One accepted herald outcome: postselect on `herald`, evolve through
/// `continuation` (which carries any correction elements), then optionally
/// postselect on `acceptance`.
struct HeraldBranch {
  std::string label;
  DetectionPattern herald;
  CircuitSpec continuation;
  std::optional<DetectionPattern> acceptance;
};

struct BranchOutcome {
  std::string label;
  double probability = 0.0;  ///< joint probability of herald and acceptance
  PhotonicState state;
};

struct FeedForwardResult {
  /// Total probability over branches; state of the first branch with nonzero
  /// probability.
  PostselectResult combined;
  std::vector<BranchOutcome> branches;
  /// All nonzero-probability branch states agree up to global phase.
  bool consistent = true;
  double max_mismatch = 0.0;
};

inline constexpr double kBranchConsistencyTolerance = 1e-9;

FeedForwardResult feed_forward(const PhotonicState& state, std::span<const HeraldBranch> branches);

// ---------------------------------------------------------------------------
// Programmable phase gate: signal and control meet on a polarizing beam
// splitter, the control passes a Hadamard-type plate and is detected behind a
// polarizer.

enum class PpgRegime { postselect_quarter, feedforward_half };

struct PpgSpec {
  std::string signal_path;
  std::string control_path;
  double phi = 0.0;
  PpgRegime regime = PpgRegime::postselect_quarter;
};

/// (|H> + e^{i phi}|V>)/sqrt2
Qubit control_qubit(double phi);

/// Plate angle of the control analysis plate (157.5 deg). It is Z H Z, which
/// cancels the i*i reflection phase of the beam splitter for the H outcome.
inline constexpr double kControlPlateAngle = 7.0 * std::numbers::pi / 8.0;

/// Elements of one gate: beam splitter, then the control plate.
std::vector<ElementSpec> ppg_elements(const std::string& signal_path, const std::string& control_path,
                                      const std::string& label_suffix);

/// Runs the gate on a single-photon signal with a prepared single-photon
/// control. Throws std::invalid_argument when the control state does not hold
/// exactly one photon on the control path, or the signal is not one photon on
/// the signal path.
PostselectResult ppg(const PhotonicState& signal, const PhotonicState& control, const PpgSpec& spec);
/// Same, with the control prepared as control_qubit(spec.phi).
PostselectResult ppg(const PhotonicState& signal, const PpgSpec& spec);

// ---------------------------------------------------------------------------
// Distinguishable photons: each photon propagates alone and detectors are
// buckets, so coincidence probabilities follow from single-photon detection
// probabilities.

/// Probability that a single photon reaches each detector and passes its
/// polarizer. The state must hold one photon on the circuit's registry.
std::vector<double> single_photon_detection(const PhotonicState& photon, const CircuitSpec& circuit,
                                            std::span<const Detector> detectors);

/// `count` independent photons, each hitting detector d with probability q[d]
/// (sum over d at most 1).
struct PhotonGroup {
  std::vector<double> q;
  int count = 0;
};

/// Probability that every detector fires at least once, by inclusion-exclusion
/// over detector subsets.
double all_detectors_fire(std::span<const PhotonGroup> groups);

}  // namespace qrouter
