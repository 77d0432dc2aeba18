#pragma once

// Scenario files: a JSON document with sections source, router, signals,
// run and outputs. Every key is checked; unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrouter/router.hpp"
#include "qrouter/source_noise.hpp"

namespace qrouter::cli {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NamedSignal {
  std::string name;  // "H", ... or "custom<i>"
  Qubit qubit;
};

enum class RunMode { ideal, monte_carlo };
enum class ProjectionSet { none, fidelity };

struct RunSettings {
  RunMode mode = RunMode::ideal;
  std::optional<std::uint64_t> seed;
  /// Per signal x control setting.
  double duration_s = 3600.0;
  /// Interfering and detuned regimes alternate with this period; 0 keeps
  /// the regime fixed by source.distinguishable.
  double interval_s = 0.0;
  /// `fidelity` adds analyzer runs parallel and orthogonal to the input state.
  ProjectionSet projections = ProjectionSet::none;
};

struct OutputSettings {
  std::optional<std::filesystem::path> path;
  std::string format = "json";
  bool full_precision = false;
};

struct Scenario {
  SourceParams source;
  /// When set, the uniform efficiency is calibrated to this accidental fraction.
  std::optional<double> calibrate_accidental_fraction;
  RouterConfig router;
  std::vector<ControlSetting> controls{ControlSetting::off(), ControlSetting::on()};
  std::vector<NamedSignal> signals;
  RunSettings run;
  OutputSettings outputs;
};

/// Throws ScenarioError with a JSON-path style location on any violation.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);

/// All six probe states, OFF and ON, basic regime, ideal run.
Scenario default_scenario();

}  // namespace qrouter::cli
