#include "qrouter/source_noise.hpp"

#include <cmath>
#include <random>
#include <string>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

namespace qrouter {

namespace {

void require_efficiency(double x, const char* what) {
  if (!std::isfinite(x) || x <= 0.0 || x > 1.0) {
    throw std::invalid_argument(std::string(what) + " must lie in (0, 1]");
  }
}

double poisson_pmf(int n, double mean) {
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
}

// Single-mode thermal statistics for the pair number.
double thermal_pmf(int n, double mean) { return std::pow(mean, n) / std::pow(1.0 + mean, n + 1); }

// P(N >= n) for the thermal distribution.
double thermal_tail(int n, double mean) { return std::pow(mean / (1.0 + mean), n); }

}  // namespace

void EfficiencyMap::validate() const {
  require_efficiency(signal, "signal efficiency");
  require_efficiency(control1, "C1 efficiency");
  require_efficiency(control2, "C2 efficiency");
  require_efficiency(out1, "OUT1 efficiency");
  require_efficiency(out2, "OUT2 efficiency");
}

void SourceParams::validate() const {
  if (!std::isfinite(mu_signal) || mu_signal < 0.0) throw std::invalid_argument("mu_signal must be >= 0");
  if (!std::isfinite(p_pair) || p_pair < 0.0 || p_pair >= 1.0) throw std::invalid_argument("p_pair must be in [0, 1)");
  if (!std::isfinite(rep_rate) || rep_rate <= 0.0) throw std::invalid_argument("rep_rate must be > 0");
  if (!std::isfinite(duration_s) || duration_s < 0.0) throw std::invalid_argument("duration must be >= 0");
  if (cutoff < 3 || cutoff > kMaxCutoff) {
    throw std::invalid_argument("photon-number cutoff must be in [3, " + std::to_string(kMaxCutoff) + "]");
  }
  eta.validate();
}

double PhotonNumberDistribution::probability(int n_signal, int n_pairs) const {
  for (const auto& e : entries) {
    if (e.n_signal == n_signal && e.n_pairs == n_pairs) return e.probability;
  }
  return 0.0;
}

PhotonNumberDistribution photon_number_distribution(const SourceParams& params, int cutoff) {
  if (cutoff < 2) throw std::invalid_argument("photon-number cutoff must be >= 2");
  if (!std::isfinite(params.mu_signal) || params.mu_signal < 0.0) throw std::invalid_argument("mu_signal must be >= 0");
  if (!std::isfinite(params.p_pair) || params.p_pair < 0.0) throw std::invalid_argument("p_pair must be >= 0");
  const double mu = params.mu_signal;
  const double p = params.p_pair;

  PhotonNumberDistribution d;
  for (int np = 0; 2 * np <= cutoff; ++np) {
    for (int ns = 0; ns + 2 * np <= cutoff; ++ns) {
      d.entries.push_back({ns, np, poisson_pmf(ns, mu) * thermal_pmf(np, p)});
    }
  }
  // Mass with n_s + 2 n_p > cutoff: signal overflow for each admissible pair
  // number, plus every pair number that alone exceeds the cutoff.
  const int max_pairs = cutoff / 2;
  double tail = thermal_tail(max_pairs + 1, p);
  for (int np = 0; np <= max_pairs; ++np) {
    const int k = cutoff - 2 * np;  // largest admissible signal number
    const double signal_over = mu > 0.0 ? boost::math::gamma_p(static_cast<double>(k + 1), mu) : 0.0;
    tail += thermal_pmf(np, p) * signal_over;
  }
  d.tail_mass = tail;
  d.truncation_warning = tail > kTruncationWarningMass;
  return d;
}

double CoincidenceRates::accidental_fraction() const {
  const double acc = accidental[0] + accidental[1];
  const double all = acc + genuine[0] + genuine[1];
  return all > 0.0 ? acc / all : 0.0;
}

double CoincidenceRates::accidental_fraction(int port) const {
  const double all = total(port);
  return all > 0.0 ? accidental[port] / all : 0.0;
}

CoincidenceModel::CoincidenceModel(const Qubit& signal, const RouterConfig& config,
                                   const PortProjections& projections) {
  quantum_ = coincidence_probabilities(signal, config, projections, false);
  classical_ = coincidence_probabilities(signal, config, projections, true);

  const RouterCircuit rc = build_router(config);
  const PhotonicState photons[3] = {
      PhotonicState::single_photon(paths::kSignalIn, signal).extended_to(rc.registry),
      PhotonicState::single_photon(paths::kControl1, rc.control1).extended_to(rc.registry),
      PhotonicState::single_photon(paths::kControl2, rc.control2).extended_to(rc.registry),
  };
  const std::string ports[2] = {paths::kOut1, paths::kOut2};
  const std::optional<Qubit> proj[2] = {projections.out1, projections.out2};
  for (const auto& b : rc.branches) {
    const CircuitSpec whole = rc.preparation.then(b.continuation);
    BranchTable t;
    for (int k = 0; k < 2; ++k) {
      std::vector<Detector> detectors = b.herald.detectors;
      for (auto& d : detectors) d.mode = DetectorMode::threshold;
      detectors.push_back({ports[k], proj[k], DetectorMode::threshold});
      for (int i = 0; i < 3; ++i) t.q[k][i] = single_photon_detection(photons[i], whole, detectors);
    }
    branches_.push_back(std::move(t));
  }
}

CoincidenceRates CoincidenceModel::rates(const SourceParams& params) const {
  params.validate();
  const auto& eta = params.eta;
  const double mu = params.mu_signal * eta.signal;
  const double p = params.p_pair;
  const double port_eta[2] = {eta.out1, eta.out2};

  CoincidenceRates r;
  const double p11 = poisson_pmf(1, mu) * thermal_pmf(1, p);
  const auto& cc = params.distinguishable ? classical_ : quantum_;
  for (int k = 0; k < 2; ++k) r.genuine[k] = p11 * cc[k] * eta.control1 * eta.control2 * port_eta[k];
  if (!params.multiphoton_noise) return r;

  SourceParams thinned = params;
  thinned.mu_signal = mu;
  const PhotonNumberDistribution dist = photon_number_distribution(thinned, params.cutoff);
  for (int k = 0; k < 2; ++k) {
    const double det_eta[3] = {eta.control1, eta.control2, port_eta[k]};
    for (const auto& b : branches_) {
      std::array<std::vector<double>, 3> q = b.q[k];
      for (auto& photon : q) {
        for (std::size_t d = 0; d < photon.size(); ++d) photon[d] *= det_eta[d];
      }
      for (const auto& e : dist.entries) {
        if (e.n_signal + 2 * e.n_pairs < 3 || (e.n_signal == 1 && e.n_pairs == 1)) continue;
        const PhotonGroup groups[3] = {{q[0], e.n_signal}, {q[1], e.n_pairs}, {q[2], e.n_pairs}};
        r.accidental[k] += e.probability * all_detectors_fire(groups);
      }
    }
  }
  return r;
}

CoincidenceRates coincidence_rates(const SourceParams& params, const Qubit& signal, const RouterConfig& config,
                                   const PortProjections& projections) {
  return CoincidenceModel(signal, config, projections).rates(params);
}

std::array<double, 2> accidental_rate(const SourceParams& params, const Qubit& signal, const RouterConfig& config,
                                      const PortProjections& projections) {
  return coincidence_rates(params, signal, config, projections).accidental;
}

std::string_view to_string(CountRegime r) { return r == CountRegime::interfering ? "interfering" : "detuned"; }

CountRegime parse_count_regime(std::string_view s) {
  if (s == "interfering") return CountRegime::interfering;
  if (s == "detuned") return CountRegime::detuned;
  throw std::invalid_argument("unknown count regime '" + std::string(s) + "'");
}

CountModel count_model(const CoincidenceRates& rates) { return {rates.genuine, rates.accidental}; }

CountModel count_model(const SourceParams& params, const RouterResult& result, const PortProjections& projections,
                       const std::array<double, 2>& accidental_per_pulse) {
  params.validate();
  const auto& eta = params.eta;
  const double mu = params.mu_signal * eta.signal;
  const double p11 = poisson_pmf(1, mu) * thermal_pmf(1, params.p_pair);
  const double port_p[2] = {result.p1, result.p2};
  const Qubit* port_q[2] = {&result.out1_qubit, &result.out2_qubit};
  const std::optional<Qubit> proj[2] = {projections.out1, projections.out2};
  const double port_eta[2] = {eta.out1, eta.out2};
  CountModel m;
  for (int k = 0; k < 2; ++k) {
    double pass = 1.0;
    if (proj[k] && port_p[k] > 0.0) pass = std::norm(overlap(*proj[k], *port_q[k]));
    m.genuine_per_pulse[k] =
        p11 * result.success_probability * port_p[k] * pass * eta.control1 * eta.control2 * port_eta[k];
  }
  m.accidental_per_pulse = accidental_per_pulse;
  return m;
}

namespace {

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

std::uint64_t draw(std::mt19937_64& rng, double mean) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<std::uint64_t>(mean)(rng);
}

CountRecord draw_record(const SourceParams& params, const CountModel& model, CountRegime regime, double duration,
                        std::mt19937_64& rng) {
  const double pulses = params.rep_rate * duration;
  CountRecord rec;
  rec.regime = regime;
  rec.duration_s = duration;
  const double acc1 = params.multiphoton_noise ? model.accidental_per_pulse[0] * pulses : 0.0;
  const double acc2 = params.multiphoton_noise ? model.accidental_per_pulse[1] * pulses : 0.0;
  rec.cc1 = draw(rng, model.genuine_per_pulse[0] * pulses + acc1);
  rec.cc2 = draw(rng, model.genuine_per_pulse[1] * pulses + acc2);
  rec.accidental_cc1 = acc1;
  rec.accidental_cc2 = acc2;
  return rec;
}

}  // namespace

CountRecord simulate_counts(const SourceParams& params, const CountModel& model, std::uint64_t seed) {
  params.validate();
  auto rng = substream(seed, 0);
  return draw_record(params, model, params.distinguishable ? CountRegime::detuned : CountRegime::interfering,
                     params.duration_s, rng);
}

std::vector<CountRecord> simulate_alternating(const SourceParams& params, const CountModel& interfering,
                                              const CountModel& detuned, double total_duration_s,
                                              double interval_s, std::uint64_t seed) {
  params.validate();
  if (!(interval_s > 0.0) || !(total_duration_s >= 0.0)) {
    throw std::invalid_argument("interval must be > 0 and total duration >= 0");
  }
  std::vector<CountRecord> out;
  double elapsed = 0.0;
  for (std::uint64_t i = 0; elapsed < total_duration_s * (1.0 - 1e-12); ++i) {
    const double len = std::min(interval_s, total_duration_s - elapsed);
    auto rng = substream(seed, i + 1);
    const bool det = i % 2 == 1;
    out.push_back(draw_record(params, det ? detuned : interfering,
                              det ? CountRegime::detuned : CountRegime::interfering, len, rng));
    elapsed += len;
  }
  return out;
}

double calibrate_efficiency(const SourceParams& params, double target, const CalibrationReference& reference) {
  if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("target accidental fraction must be in (0, 1)");
  const CoincidenceModel model(reference.signal, reference.config, reference.projections);
  SourceParams trial = params;
  auto excess = [&](double eta) {
    trial.eta = EfficiencyMap::uniform(eta);
    return model.rates(trial).accidental_fraction() - target;
  };
  const double at_one = excess(1.0);
  if (std::abs(at_one) <= 1e-12) return 1.0;
  const double at_low = excess(kCalibrationLowerBracket);
  if ((at_one > 0.0) == (at_low > 0.0)) {
    trial.eta = EfficiencyMap::uniform(1.0);
    const double f1 = model.rates(trial).accidental_fraction();
    trial.eta = EfficiencyMap::uniform(kCalibrationLowerBracket);
    const double f0 = model.rates(trial).accidental_fraction();
    throw CalibrationError("accidental fraction " + std::to_string(target) + " not reachable: it spans [" +
                           std::to_string(std::min(f0, f1)) + ", " + std::to_string(std::max(f0, f1)) +
                           "] for efficiencies in [" + std::to_string(kCalibrationLowerBracket) + ", 1]");
  }
  std::uintmax_t iterations = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(excess, kCalibrationLowerBracket, 1.0, at_low, at_one,
                                                          boost::math::tools::eps_tolerance<double>(40), iterations);
  const double eta = 0.5 * (lo + hi);
  if (std::abs(excess(eta)) > kCalibrationTolerance) {
    throw CalibrationError("efficiency calibration did not converge");
  }
  return eta;
}

}  // namespace qrouter
