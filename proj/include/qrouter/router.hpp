#pragma once

// Assembly of the three-photon linear-optical router and its coherence-test
// variant.
//
// Layout (path names are the registry labels):
//
//   S_IN --BD1--> S1 (H), S2 (V); HWP 45 on S2 so both arms carry H
//   HG on S1, S2; PBS1 (S1, C1), PBS2 (S2, C2); control plates on C1, C2
//   -- control detectors C1, C2 (heralds; feed-forward acts here) --
//   HG on S1, S2; BD2: S1 -> A1 (H), A2 (V) and S2 -> B1 (H), B2 (V)
//   M1 on B2; BD3 joins A1/H and B2/V into OUT1
//   HWP 45 on A2 and B1; BD4 joins A2/H and B1/V into OUT2
//
// In the coherence-test variant M1 and BD3 are taken out: the A1 beam
// travels into the B1 slot, and BD4 overlaps it with A2 in the monitored
// port OUT1. The BD4 tilt is a phase shifter on A2/H in front of BD4.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qrouter/circuit.hpp"

namespace qrouter {

namespace paths {
inline const std::string kSignalIn = "S_IN";
inline const std::string kControl1 = "C1";
inline const std::string kControl2 = "C2";
inline const std::string kS1 = "S1";
inline const std::string kS2 = "S2";
inline const std::string kA1 = "A1";
inline const std::string kA2 = "A2";
inline const std::string kB1 = "B1";
inline const std::string kB2 = "B2";
inline const std::string kOut1 = "OUT1";
inline const std::string kOut2 = "OUT2";
}  // namespace paths

enum class ControlName { off, on, balanced };

struct ControlSetting {
  double phi = 0.0;
  std::optional<ControlName> name;

  static ControlSetting off() { return {0.0, ControlName::off}; }
  static ControlSetting on() { return {std::numbers::pi, ControlName::on}; }
  static ControlSetting balanced() { return {std::numbers::pi / 2.0, ControlName::balanced}; }
  static ControlSetting custom(double phi) { return {phi, std::nullopt}; }
  /// "OFF", "ON" or "BALANCED".
  static ControlSetting named(std::string_view name);
  std::string label() const;
};

enum class RouterRegime { basic_1_16, swap_1_8, feedforward_1_4 };
enum class RouterVariant { full, coherence_test };
/// How the second control gets its extra pi: prepared directly, or by a
/// half-wave plate at 0 deg on C2.
enum class Control2Shift { state_preparation, waveplate };

std::string_view to_string(RouterRegime r);
std::string_view to_string(RouterVariant v);
RouterRegime parse_regime(std::string_view s);
RouterVariant parse_variant(std::string_view s);

struct RouterConfig {
  ControlSetting control = ControlSetting::off();
  RouterRegime regime = RouterRegime::basic_1_16;
  RouterVariant variant = RouterVariant::full;
  Control2Shift control2_shift = Control2Shift::state_preparation;
  /// Adds a +pi/2 phase shifter on OUT2, cancelling the -i between ports.
  bool output_phase_correction = false;
  /// BD4 tilt phase; coherence-test variant only.
  double bd4_tilt = 0.0;
  /// Analyzer in front of OUT1 in the coherence test.
  Qubit coherence_projection = Qubit::D();

  /// Throws std::invalid_argument for combinations that have no meaning.
  void validate() const;
};

struct RouterCircuit {
  RouterConfig config;
  ModeRegistry registry;
  Qubit control1;
  Qubit control2;
  /// Input preparation through the control analysis plates.
  CircuitSpec preparation;
  /// Accepted control outcomes. Each continuation holds that outcome's
  /// corrections and the recombination optics; acceptance is left empty.
  std::vector<HeraldBranch> branches;

  /// Signal at S_IN and both controls, on the full registry.
  PhotonicState input(const Qubit& signal) const;
};

RouterCircuit build_router(const RouterConfig& config);

struct RouterResult {
  Qubit out1_qubit{0.0, 0.0};
  Qubit out2_qubit{0.0, 0.0};
  /// Analytic routing amplitudes cos(phi/2) and -i sin(phi/2).
  Complex c1;
  Complex c2;
  double success_probability = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  /// Conditional signal state on the OUT1/OUT2 modes, normalized.
  PhotonicState output;
  std::vector<BranchOutcome> branches;
};

/// Full three-photon evolution and post-selection. Throws
/// std::invalid_argument for an unnormalized signal.
RouterResult run_router(const Qubit& signal, const RouterConfig& config);

/// cos(phi/2)(a|H>+b|V>)_OUT1 - i sin(phi/2)(a|H>+b|V>)_OUT2
PhotonicState analytic_output(const Qubit& signal, double phi);
/// (a/sqrt2)(|H>+e^{i phi}|V>)_S1 + (b/sqrt2)(|H>-e^{i phi}|V>)_S2
PhotonicState analytic_intermediate(const Qubit& signal, double phi);

/// Signal state on S1/S2 right after both gates, conditioned on both
/// controls detected in H.
PhotonicState intermediate_state_check(const Qubit& signal, double phi);

/// Output analyzers for the coincidence patterns; nullopt means no polarizer.
struct PortProjections {
  std::optional<Qubit> out1;
  std::optional<Qubit> out2;
};

/// Probabilities of the three-fold events CC1 and CC2 (both controls plus one
/// signal output) per input triple. With `distinguishable`, photons propagate
/// independently into bucket detectors (the detuned regime).
std::array<double, 2> coincidence_probabilities(const Qubit& signal, const RouterConfig& config,
                                                const PortProjections& projections, bool distinguishable = false);

struct FringeSample {
  double phase = 0.0;
  double probability = 0.0;
};

/// CC1 probability versus BD4 tilt. Requires the coherence-test variant.
std::vector<FringeSample> coherence_scan(const Qubit& signal, const RouterConfig& config,
                                         std::span<const double> bd4_phases, bool distinguishable = false);

}  // namespace qrouter
