#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "qrouter/tables.hpp"

#ifndef QROUTER_DATA_DIR
#define QROUTER_DATA_DIR "data"
#endif

namespace {

using namespace qrouter::cli;

constexpr int kValidationError = 1;
constexpr int kAcceptanceFailure = 2;

struct Common {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string format;
  std::string out;
  std::string precision;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--scenario", c.scenario, "Scenario JSON file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Random seed (u64)");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", c.out, "Write output to this file instead of stdout");
  cmd->add_option("--precision", c.precision, "\"full\" for 17 significant digits")->check(CLI::IsMember({"full", "6"}));
}

Scenario scenario_for(const Common& c) { return c.scenario.empty() ? default_scenario() : load_scenario(c.scenario); }

void emit(const Report& rep, const Common& c, const Scenario* sc, const std::string& default_format) {
  RenderOptions opt;
  std::string format = default_format;
  std::string path;
  if (sc != nullptr) {
    if (sc->outputs.path) path = sc->outputs.path->string();
    opt.full_precision = sc->outputs.full_precision;
    if (!c.scenario.empty()) format = sc->outputs.format;
  }
  if (!c.format.empty()) format = c.format;
  if (!c.out.empty()) path = c.out;
  if (!c.precision.empty()) opt.full_precision = c.precision == "full";
  opt.format = parse_format(format);
  const std::string text = render(rep, opt);
  if (path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-photon linear-optical router: simulation and analysis"};
  app.require_subcommand(1);

  Common ideal_opts, sweep_opts, sim_opts, analyze_opts, repro_opts;
  auto* ideal = app.add_subcommand("ideal", "Exact three-photon runs for every signal and control setting");
  add_common(ideal, ideal_opts);

  auto* sweep = app.add_subcommand("sweep-phi", "Routing probabilities over a grid of control phases");
  add_common(sweep, sweep_opts);
  std::string grid = "0:2pi:9";
  sweep->add_option("--grid", grid, "start:stop:count or comma list; values may end in pi")->capture_default_str();

  auto* sim = app.add_subcommand("simulate-counts", "Seeded Poisson coincidence counts");
  add_common(sim, sim_opts);

  auto* analyze = app.add_subcommand("analyze", "Estimators over count, summary or fringe tables");
  add_common(analyze, analyze_opts);
  std::vector<std::string> files;
  std::optional<double> floor;
  analyze->add_option("tables", files, "CSV tables (kind detected from the header)")->required()->check(CLI::ExistingFile);
  analyze->add_option("--noise-floor", floor, "Constant background subtracted from the fringe offset");

  auto* repro = app.add_subcommand("reproduce", "Compare simulation and bundled tables with the reported values");
  add_common(repro, repro_opts);
  std::string data_dir = QROUTER_DATA_DIR;
  repro->add_option("--data-dir", data_dir, "Directory with the bundled tables")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (ideal->parsed()) {
      const Scenario sc = scenario_for(ideal_opts);
      emit(cmd_ideal(sc), ideal_opts, &sc, "json");
    } else if (sweep->parsed()) {
      const Scenario sc = scenario_for(sweep_opts);
      emit(cmd_sweep_phi(sc, parse_grid(grid)), sweep_opts, &sc, "csv");
    } else if (sim->parsed()) {
      const Scenario sc = scenario_for(sim_opts);
      emit(cmd_simulate_counts(sc, sim_opts.seed), sim_opts, &sc, "csv");
    } else if (analyze->parsed()) {
      AnalyzeInputs in;
      for (const auto& f : files) in.files.emplace_back(f);
      in.noise_floor = floor;
      emit(cmd_analyze(in), analyze_opts, nullptr, "json");
    } else if (repro->parsed()) {
      const ReproduceResult r = cmd_reproduce(data_dir);
      Common c = repro_opts;
      emit(r.report, c, nullptr, "csv");
      if (!r.all_pass) {
        std::cerr << "reproduce: at least one check failed\n";
        return kAcceptanceFailure;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  }
  return 0;
}
