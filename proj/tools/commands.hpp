#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "report.hpp"
#include "scenario.hpp"

namespace qrouter::cli {

/// Ideal three-photon runs for every (signal, control) pair.
Report cmd_ideal(const Scenario& sc);

/// Routing probabilities over a grid of control phases, first signal only.
Report cmd_sweep_phi(const Scenario& sc, const std::vector<double>& grid);

/// "start:stop:count" (inclusive ends) or a comma-separated list. A trailing
/// "pi" on a number multiplies it by pi. Throws std::invalid_argument.
std::vector<double> parse_grid(const std::string& text);

/// Seeded Poisson count records. Needs run.mode = monte_carlo and a seed
/// (from the scenario or the override); throws ScenarioError otherwise.
Report cmd_simulate_counts(const Scenario& sc, std::optional<std::uint64_t> seed_override);

struct AnalyzeInputs {
  /// Count tables, routing/fidelity summaries or fringe scans; the kind is
  /// recognised from the header.
  std::vector<std::filesystem::path> files;
  std::optional<double> noise_floor;
};

Report cmd_analyze(const AnalyzeInputs& in);

struct ReproduceResult {
  Report report;
  bool all_pass = true;
};

/// Ideal simulation plus analysis of the bundled tables, each compared with
/// the reported value at its tolerance.
ReproduceResult cmd_reproduce(const std::filesystem::path& data_dir);

}  // namespace qrouter::cli
