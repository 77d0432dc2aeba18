#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qrouter/circuit.hpp"

using namespace qrouter;

namespace {

constexpr double kPi = std::numbers::pi;

Qubit random_qubit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return Qubit{Complex(g(rng), g(rng)), Complex(g(rng), g(rng))}.normalized();
}

PhotonicState photon(const std::string& path, const Qubit& q) { return PhotonicState::single_photon(path, q); }

double distance(const PhotonicState& a, const PhotonicState& b) { return phase_insensitive_distance(a, b); }

// (|H>_s|H>_c + |V>_s|V>_c)/sqrt2 on registry s, c.
PhotonicState bell_pair() {
  const auto reg = ModeRegistry::from_paths({"s", "c"});
  const double r = 1.0 / std::sqrt(2.0);
  return PhotonicState(reg, 2, {{{1, 0, 1, 0}, r}, {{0, 1, 0, 1}, r}});
}

}  // namespace

TEST(Circuit, EmptyCircuitIsIdentity) {
  const auto s = photon("a", Qubit::R());
  EXPECT_NEAR(distance(evolve(s, CircuitSpec(s.registry(), {})), s), 0.0, 1e-15);
}

TEST(Circuit, TwoHadamardPlatesCancel) {
  const auto s = photon("a", Qubit{0.6, Complex(0, 0.8)});
  const auto hwp = WavePlateSetting::half_wave_deg(22.5);
  const CircuitSpec c(s.registry(), {{"h1", WavePlate{"a", hwp}}, {"h2", WavePlate{"a", hwp}}});
  EXPECT_NEAR(std::abs(inner_product(evolve(s, c), s) - Complex(1.0)), 0.0, 1e-12);
}

TEST(Circuit, RejectsUnregisteredPaths) {
  const auto reg = ModeRegistry::from_paths({"a"});
  EXPECT_THROW(CircuitSpec(reg, {{"pbs", PolarizingBeamSplitter{"a", "b"}}}), std::invalid_argument);
}

TEST(Circuit, ThenAndFind) {
  const auto reg = ModeRegistry::from_paths({"a"});
  const CircuitSpec a(reg, {{"m", Mirror{"a"}}});
  const CircuitSpec b(reg, {{"hg", HadamardPlate{"a"}}});
  const auto ab = a.then(b);
  EXPECT_EQ(ab.size(), 2u);
  EXPECT_EQ(ab.find("hg"), 1u);
  EXPECT_FALSE(ab.find("x").has_value());
}

TEST(Postselect, OwnPolarizationHasProbabilityOne) {
  const Qubit q{0.6, Complex(0, 0.8)};
  const auto r = postselect(photon("a", q), {{{"a", q, DetectorMode::exact_one}}, true, {}});
  EXPECT_NEAR(r.probability, 1.0, 1e-12);
  EXPECT_EQ(r.state.photon_number(), 0);
}

TEST(Postselect, OrthogonalPolarizationHasProbabilityZero) {
  const auto r = postselect(photon("a", Qubit::H()), {{{"a", Qubit::V(), DetectorMode::exact_one}}, false, {}});
  EXPECT_EQ(r.probability, 0.0);
  EXPECT_TRUE(r.state.empty());
}

TEST(Postselect, DetectorWithoutPolarizerKeepsPhoton) {
  const auto s = photon("a", Qubit::D());
  const auto r = postselect(s, {{{"a", std::nullopt, DetectorMode::exact_one}}, false, {}});
  EXPECT_NEAR(r.probability, 1.0, 1e-12);
  EXPECT_NEAR(distance(r.state, s), 0.0, 1e-12);
}

TEST(Postselect, ThresholdFiresOnBunchedPhotons) {
  const auto reg = ModeRegistry::from_paths({"a"});
  const auto two = PhotonicState::basis(reg, {2, 0});
  EXPECT_EQ(postselect(two, {{{"a", std::nullopt, DetectorMode::exact_one}}, false, {}}).probability, 0.0);
  EXPECT_NEAR(postselect(two, {{{"a", std::nullopt, DetectorMode::threshold}}, false, {}}).probability, 1.0,
              1e-12);
}

TEST(Postselect, UnknownPathRejected) {
  EXPECT_THROW(postselect(photon("a", Qubit::H()), {{{"zz", std::nullopt, DetectorMode::exact_one}}, false, {}}),
               std::invalid_argument);
}

TEST(Postselect, SinglePhotonOutcomesAreComplete) {
  std::mt19937_64 rng(7);
  const auto reg = ModeRegistry::from_paths({"a", "b", "c"});
  for (int trial = 0; trial < 20; ++trial) {
    PhotonicState::Terms t;
    std::normal_distribution<double> g;
    for (std::size_t m = 0; m < reg.size(); ++m) {
      Occupation o(reg.size(), 0);
      o[m] = 1;
      t[o] = {g(rng), g(rng)};
    }
    const auto s = PhotonicState(reg, 1, t).normalized();
    double total = 0.0;
    for (const std::string path : {"a", "b", "c"}) {
      for (const Qubit& q : {Qubit::D(), Qubit::A()}) {
        const auto r = postselect(s, {{{path, q, DetectorMode::exact_one}}, true, {}});
        total += r.probability;
        if (r.probability > 0.0) {
          EXPECT_NEAR(r.state.squared_norm(), 1.0, 1e-12);
        }
      }
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(Postselect, TwoPhotonOutcomesAreComplete) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = tensor(photon("a", random_qubit(rng)), photon("b", random_qubit(rng)));
    const Qubit basis[] = {Qubit::R(), Qubit::L()};
    double total = 0.0;
    for (const auto& qa : basis) {
      for (const auto& qb : basis) {
        DetectionPattern p{{{"a", qa, DetectorMode::exact_one}, {"b", qb, DetectorMode::exact_one}}, true, {}};
        total += postselect(s, p).probability;
      }
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(FeedForward, UncorrectedBranchesAreFlagged) {
  const auto s = bell_pair();
  const CircuitSpec none(s.registry(), {});
  const DetectionPattern keep{{}, true, {"s"}};
  const std::vector<HeraldBranch> branches{
      {"H", {{{"c", Qubit::H(), DetectorMode::exact_one}}, false, {}}, none, keep},
      {"V", {{{"c", Qubit::V(), DetectorMode::exact_one}}, false, {}}, none, keep},
  };
  const auto ff = feed_forward(s, branches);
  EXPECT_FALSE(ff.consistent);
  EXPECT_GT(ff.max_mismatch, kBranchConsistencyTolerance);
  EXPECT_NEAR(ff.combined.probability, 1.0, 1e-12);
}

TEST(FeedForward, CorrectionRestoresConsistency) {
  const auto s = bell_pair();
  const CircuitSpec none(s.registry(), {});
  const CircuitSpec flip(s.registry(), {{"fix", WavePlate{"s", WavePlateSetting::half_wave_deg(45.0)}}});
  const DetectionPattern keep{{}, true, {"s"}};
  const std::vector<HeraldBranch> branches{
      {"H", {{{"c", Qubit::H(), DetectorMode::exact_one}}, false, {}}, none, keep},
      {"V", {{{"c", Qubit::V(), DetectorMode::exact_one}}, false, {}}, flip, keep},
  };
  const auto ff = feed_forward(s, branches);
  EXPECT_TRUE(ff.consistent);
  EXPECT_LT(ff.max_mismatch, kBranchConsistencyTolerance);
  EXPECT_NEAR(ff.combined.probability, 1.0, 1e-12);
  ASSERT_EQ(ff.branches.size(), 2u);
  EXPECT_NEAR(ff.branches[0].probability, 0.5, 1e-12);
  const auto out = ff.combined.state.restricted_to(ModeRegistry::from_paths({"s"}));
  EXPECT_NEAR(distance(out, photon("s", Qubit::H())), 0.0, 1e-12);
}

TEST(Ppg, IdentityProgram) {
  const auto r = ppg(photon("s", Qubit::D()), PpgSpec{"s", "c", 0.0, PpgRegime::postselect_quarter});
  EXPECT_NEAR(r.probability, 0.25, 1e-12);
  EXPECT_NEAR(distance(r.state, photon("s", Qubit::D())), 0.0, 1e-12);
}

TEST(Ppg, PiFlipsDiagonalToAntidiagonal) {
  const auto r = ppg(photon("s", Qubit::D()), PpgSpec{"s", "c", kPi, PpgRegime::postselect_quarter});
  EXPECT_NEAR(r.probability, 0.25, 1e-12);
  EXPECT_NEAR(distance(r.state, photon("s", Qubit::A())), 0.0, 1e-12);
}

TEST(Ppg, FeedForwardDoublesSuccess) {
  for (const double phi : {0.0, kPi / 3, kPi}) {
    const auto q = ppg(photon("s", Qubit::D()), PpgSpec{"s", "c", phi, PpgRegime::postselect_quarter});
    const auto h = ppg(photon("s", Qubit::D()), PpgSpec{"s", "c", phi, PpgRegime::feedforward_half});
    EXPECT_NEAR(h.probability, 0.5, 1e-12);
    EXPECT_NEAR(distance(q.state, h.state), 0.0, 1e-12);
  }
}

TEST(Ppg, ImprintsPhaseOnV) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  for (int i = 0; i < 20; ++i) {
    const Qubit in = random_qubit(rng);
    const double phi = u(rng);
    const auto r = ppg(photon("s", in), PpgSpec{"s", "c", phi, PpgRegime::postselect_quarter});
    const Qubit expected{in.h, std::polar(1.0, phi) * in.v};
    EXPECT_NEAR(r.probability, 0.25, 1e-12);
    EXPECT_NEAR(distance(r.state, photon("s", expected)), 0.0, 1e-10);
  }
}

TEST(Ppg, InverseProgramUndoesGate) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  for (int i = 0; i < 10; ++i) {
    const Qubit in = random_qubit(rng);
    const double phi = u(rng);
    const auto a = ppg(photon("s", in), PpgSpec{"s", "c", phi, PpgRegime::postselect_quarter});
    const auto b = ppg(a.state, PpgSpec{"s", "c", -phi, PpgRegime::postselect_quarter});
    EXPECT_NEAR(a.probability * b.probability, 1.0 / 16.0, 1e-12);
    EXPECT_NEAR(distance(b.state, photon("s", in)), 0.0, 1e-10);
  }
}

TEST(Ppg, RejectsMissingOrMisplacedControl) {
  const auto s = photon("s", Qubit::H());
  const PpgSpec spec{"s", "c", 0.0, PpgRegime::postselect_quarter};
  EXPECT_THROW(ppg(s, PhotonicState::vacuum(ModeRegistry::from_paths({"c"})), spec), std::invalid_argument);
  EXPECT_THROW(ppg(s, photon("x", Qubit::H()), spec), std::invalid_argument);
}

TEST(Distinguishable, AllDetectorsFireInclusionExclusion) {
  // Two photons, each to detector 0 or 1 with 1/2: both fire with probability 1/2.
  const std::vector<PhotonGroup> groups{{{0.5, 0.5}, 2}};
  EXPECT_NEAR(all_detectors_fire(groups), 0.5, 1e-15);
  // One photon per detector with certainty.
  const std::vector<PhotonGroup> sure{{{1.0, 0.0}, 1}, {{0.0, 1.0}, 1}};
  EXPECT_NEAR(all_detectors_fire(sure), 1.0, 1e-15);
  // Too few photons.
  const std::vector<PhotonGroup> one{{{0.5, 0.5}, 1}};
  EXPECT_NEAR(all_detectors_fire(one), 0.0, 1e-15);
}

TEST(Distinguishable, SinglePhotonDetection) {
  const auto s = photon("a", Qubit::D());
  const CircuitSpec c(s.registry(), {});
  const std::vector<Detector> d{{"a", Qubit::H(), DetectorMode::threshold}, {"a", Qubit::D(), DetectorMode::threshold}};
  const auto q = single_photon_detection(s, c, d);
  ASSERT_EQ(q.size(), 2u);
  EXPECT_NEAR(q[0], 0.5, 1e-12);
  EXPECT_NEAR(q[1], 1.0, 1e-12);
}
