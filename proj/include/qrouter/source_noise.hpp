#pragma once

// Photon-number statistics of the three-photon source and the coincidence
// rates they produce behind the router.
//
// The signal input is an attenuated coherent state (Poissonian photon
// number); the two controls come from SPDC pairs (single-mode thermal pair
// number, one photon of every pair in each control input). Genuine
// coincidences are the one-signal/one-pair events propagated with full
// quantum interference. Accidental coincidences are all other photon-number
// configurations; their photons are propagated as distinguishable particles
// into bucket detectors with efficiencies folded in as independent loss.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qrouter/router.hpp"

namespace qrouter {

/// Per-channel efficiencies. `signal` is the signal-input transmission
/// (thinning the coherent state); the others are detector efficiencies.
struct EfficiencyMap {
  double signal = 1.0;
  double control1 = 1.0;
  double control2 = 1.0;
  double out1 = 1.0;
  double out2 = 1.0;

  static EfficiencyMap uniform(double eta) { return {eta, eta, eta, eta, eta}; }
  void validate() const;
};

struct SourceParams {
  /// Mean photons per pulse in the attenuated signal beam.
  double mu_signal = 0.00125;
  /// Mean SPDC pairs per pulse (2000 pairs/s at 80 MHz).
  double p_pair = 2.5e-5;
  double rep_rate = 80e6;
  EfficiencyMap eta;
  double duration_s = 0.0;
  /// Temporal overlap detuned: photons do not interfere.
  bool distinguishable = false;
  /// When false, only one-signal/one-pair events are generated.
  bool multiphoton_noise = true;
  /// Largest total photon number enumerated for accidentals.
  int cutoff = 4;

  static double pair_probability(double pair_rate_hz, double rep_rate_hz) { return pair_rate_hz / rep_rate_hz; }
  void validate() const;
};

struct PhotonNumberEntry {
  int n_signal = 0;
  int n_pairs = 0;
  double probability = 0.0;
};

struct PhotonNumberDistribution {
  /// All (n_signal, n_pairs) with n_signal + 2 n_pairs <= cutoff.
  std::vector<PhotonNumberEntry> entries;
  /// Probability mass beyond the cutoff, computed from the distribution tails.
  double tail_mass = 0.0;
  /// Set when tail_mass > 1e-9.
  bool truncation_warning = false;

  double probability(int n_signal, int n_pairs) const;
};

inline constexpr double kTruncationWarningMass = 1e-9;

/// Throws std::invalid_argument for cutoff < 2.
PhotonNumberDistribution photon_number_distribution(const SourceParams& params, int cutoff);

/// Per-pulse three-fold coincidence probabilities for each output port.
struct CoincidenceRates {
  std::array<double, 2> genuine{0.0, 0.0};
  std::array<double, 2> accidental{0.0, 0.0};

  double total(int port) const { return genuine[port] + accidental[port]; }
  /// Accidental share of all coincidences, both ports together.
  double accidental_fraction() const;
  double accidental_fraction(int port) const;
};

/// Efficiency-independent detection tables for one router setting; rates for
/// many source parameters can be evaluated from one table.
class CoincidenceModel {
 public:
  CoincidenceModel(const Qubit& signal, const RouterConfig& config, const PortProjections& projections);

  CoincidenceRates rates(const SourceParams& params) const;

 private:
  // Per accepted herald outcome and port: single-photon probabilities to hit
  // {C1, C2, OUTk} for the signal, control 1 and control 2 photons.
  struct BranchTable {
    std::array<std::array<std::vector<double>, 3>, 2> q;
  };
  std::vector<BranchTable> branches_;
  std::array<double, 2> quantum_{0.0, 0.0};
  std::array<double, 2> classical_{0.0, 0.0};
};

CoincidenceRates coincidence_rates(const SourceParams& params, const Qubit& signal, const RouterConfig& config,
                                   const PortProjections& projections);

/// Accidental coincidence probability per pulse for each port.
std::array<double, 2> accidental_rate(const SourceParams& params, const Qubit& signal, const RouterConfig& config,
                                      const PortProjections& projections);

enum class CountRegime { interfering, detuned };
std::string_view to_string(CountRegime r);
CountRegime parse_count_regime(std::string_view s);

struct CountRecord {
  CountRegime regime = CountRegime::interfering;
  double duration_s = 0.0;
  std::uint64_t cc1 = 0;
  std::uint64_t cc2 = 0;
  /// Expected accidental counts over the record, as estimated from the source model.
  double accidental_cc1 = 0.0;
  double accidental_cc2 = 0.0;
};

/// Expected coincidences per pulse feeding the Poisson draws.
struct CountModel {
  std::array<double, 2> genuine_per_pulse{0.0, 0.0};
  std::array<double, 2> accidental_per_pulse{0.0, 0.0};
};

CountModel count_model(const CoincidenceRates& rates);

/// Genuine rate from an ideal router result: one-signal/one-pair probability
/// x success x port probability x analyzer transmission x detection efficiencies.
CountModel count_model(const SourceParams& params, const RouterResult& result, const PortProjections& projections,
                       const std::array<double, 2>& accidental_per_pulse);

/// Poisson draws over params.duration_s. The regime follows
/// params.distinguishable. Identical (params, model, seed) give identical records.
CountRecord simulate_counts(const SourceParams& params, const CountModel& model, std::uint64_t seed);

/// Alternates interfering and detuned intervals (interfering first), one
/// record per interval, each drawn from its own seeded substream.
std::vector<CountRecord> simulate_alternating(const SourceParams& params, const CountModel& interfering,
                                              const CountModel& detuned, double total_duration_s,
                                              double interval_s, std::uint64_t seed);

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reference setting for efficiency calibration.
struct CalibrationReference {
  Qubit signal = Qubit::H();
  RouterConfig config;
  PortProjections projections;
};

inline constexpr double kCalibrationTolerance = 1e-4;
inline constexpr double kCalibrationLowerBracket = 1e-3;

/// Uniform efficiency eta (applied to every channel) at which the accidental
/// fraction of the reference setting equals `target`, by bracketed root
/// finding on [1e-3, 1]. Throws CalibrationError if the target is outside the
/// bracket's range, std::invalid_argument if target is not in (0, 1).
double calibrate_efficiency(const SourceParams& params, double target_accidental_fraction,
                            const CalibrationReference& reference = {});

}  // namespace qrouter
