#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qrouter/analysis.hpp"

using namespace qrouter;

namespace {

constexpr double kPi = std::numbers::pi;

struct Fringe {
  std::vector<double> phases, counts, sigmas;
};

Fringe synthetic(double a, double b, double phi0, int n, double noise, std::mt19937_64* rng) {
  Fringe f;
  std::normal_distribution<double> g(0.0, noise);
  for (int i = 0; i < n; ++i) {
    const double phi = 2 * kPi * i / n;
    f.phases.push_back(phi);
    f.counts.push_back(a + b * std::cos(phi - phi0) + (rng ? g(*rng) : 0.0));
    f.sigmas.push_back(noise > 0 ? noise : 1.0);
  }
  return f;
}

double wrap(double x) { return std::remainder(x, 2 * kPi); }

}  // namespace

TEST(Routing, Symmetric) {
  const auto e = routing_probability(50, 50);
  EXPECT_DOUBLE_EQ(e.value, 0.5);
  EXPECT_NEAR(e.sigma, std::sqrt(2500.0 / 1e6), 1e-15);
}

TEST(Routing, AllInPortTwo) {
  const auto e = routing_probability(0, 37);
  EXPECT_DOUBLE_EQ(e.value, 1.0);
  EXPECT_EQ(e.sigma, 0.0);
}

TEST(Routing, TableRowScale) {
  // 248 coincidences split 43 / 205.
  const auto e = routing_probability(43, 205);
  EXPECT_NEAR(e.value, 0.827, 5e-4);
  EXPECT_NEAR(e.sigma, 0.024, 5e-4);
}

TEST(Routing, ZeroCountsRejected) {
  EXPECT_THROW(routing_probability(0, 0), std::invalid_argument);
  EXPECT_THROW(routing_probability(Estimate{-1, 1}, Estimate{1, 1}), std::invalid_argument);
}

TEST(Routing, DoublingCountsShrinksSigmaBySqrt2) {
  const auto a = routing_probability(120, 35);
  const auto b = routing_probability(240, 70);
  EXPECT_NEAR(a.sigma / b.sigma, std::sqrt(2.0), 0.01 * std::sqrt(2.0));
  const auto f = fidelity_from_counts(90, 9);
  const auto g = fidelity_from_counts(180, 18);
  EXPECT_NEAR(f.sigma / g.sigma, std::sqrt(2.0), 0.01 * std::sqrt(2.0));
}

TEST(Accidentals, ZeroAccidentalsLeaveCountsAlone) {
  CountRecord r;
  r.cc1 = 100;
  r.cc2 = 7;
  const auto c = subtract_accidentals(r);
  EXPECT_EQ(c.cc1.value, 100.0);
  EXPECT_EQ(c.cc2.value, 7.0);
  EXPECT_NEAR(c.cc1.sigma, 10.0, 1e-12);
}

TEST(Accidentals, NegativeCorrectedCountsAreKept) {
  CountRecord r;
  r.cc1 = 100;
  r.cc2 = 3;
  r.accidental_cc1 = 20;
  r.accidental_cc2 = 5;
  const auto c = subtract_accidentals(r);
  EXPECT_EQ(c.cc1.value, 80.0);
  EXPECT_EQ(c.cc2.value, -2.0);
  EXPECT_NEAR(c.cc2.sigma, std::sqrt(8.0), 1e-12);
}

TEST(Fidelity, FromCounts) {
  EXPECT_DOUBLE_EQ(fidelity_from_counts(40, 40).value, 0.5);
  const auto one = fidelity_from_counts(40, 0);
  EXPECT_EQ(one.value, 1.0);
  EXPECT_EQ(one.sigma, 0.0);
  EXPECT_NEAR(fidelity_from_counts(907, 93).value, 0.907, 1e-12);
  EXPECT_THROW(fidelity_from_counts(0, 0), std::invalid_argument);
  EXPECT_THROW(fidelity_from_counts(-1, 3), std::invalid_argument);
}

TEST(Fidelity, FromState) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    const Qubit q = Qubit{Complex(g(rng), g(rng)), Complex(g(rng), g(rng))}.normalized();
    EXPECT_NEAR(fidelity_from_state(PolarizationDensity::pure(q), q), 1.0, 1e-12);
    EXPECT_NEAR(fidelity_from_state(PolarizationDensity::maximally_mixed(), q), 0.5, 1e-12);
  }
}

TEST(Fidelity, CountEstimatorAgreesWithState) {
  Eigen::Matrix2cd m;
  m << 0.7, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.3;
  const PolarizationDensity rho(m);
  for (const auto name : kProbeStateNames) {
    const Qubit q = Qubit::named(name);
    const double par = rho.expectation(q);
    const double orth = rho.expectation(q.orthogonal());
    EXPECT_NEAR(fidelity_from_counts(par, orth).value, fidelity_from_state(rho, q), 1e-12) << name;
  }
}

TEST(Fidelity, InvalidDensityRejected) {
  Eigen::Matrix2cd m;
  m << 0.5, 0.0, 0.0, 0.6;
  EXPECT_THROW(PolarizationDensity{m}, std::invalid_argument);
  m << 1.2, 0.0, 0.0, -0.2;
  EXPECT_THROW(PolarizationDensity{m}, std::invalid_argument);
  m << 0.5, 0.3, 0.1, 0.5;
  EXPECT_THROW(PolarizationDensity{m}, std::invalid_argument);
}

TEST(Fidelity, MeanOfTwelve) {
  const std::vector<Estimate> ones(12, Estimate{1.0, 0.0});
  const auto m = mean_fidelity(ones);
  EXPECT_EQ(m.value, 1.0);
  EXPECT_EQ(m.sigma, 0.0);
  EXPECT_THROW(mean_fidelity(std::span(ones).first(11)), std::invalid_argument);
}

TEST(Contrast, PortDefinitions) {
  const std::vector<ContrastEntry> t{{"H", {0.1, 0}, {0.9, 0}}, {"V", {0.2, 0}, {0.8, 0}}};
  const auto s = contrast_summary(t);
  ASSERT_EQ(s.port1.per_state.size(), 2u);
  EXPECT_NEAR(s.port1.per_state[0], 9.0, 1e-12);
  EXPECT_NEAR(s.port2.per_state[1], 4.0, 1e-12);
  EXPECT_NEAR(s.port2.mean.value, 6.5, 1e-12);
  EXPECT_NEAR(s.port2.mean.sigma, std::sqrt(12.5), 1e-12);
}

TEST(Contrast, PerfectRoutingIsUnbounded) {
  const std::vector<ContrastEntry> t{{"H", {0.0, 0}, {1.0, 0}}, {"V", {0.1, 0}, {0.8, 0}}};
  const auto s = contrast_summary(t);
  ASSERT_EQ(s.port1.unbounded.size(), 1u);
  EXPECT_EQ(s.port1.unbounded[0], "H");
  ASSERT_EQ(s.port2.unbounded.size(), 1u);
  EXPECT_NEAR(s.port2.mean.value, 8.0, 1e-12);
}

TEST(FringeFit, NoiselessRoundTrip) {
  const auto f = synthetic(50, 38, 0.4, 11, 0.0, nullptr);
  const auto fit = fit_fringe(f.phases, f.counts, f.sigmas);
  EXPECT_NEAR(fit.offset, 50, 1e-6);
  EXPECT_NEAR(fit.amplitude, 38, 1e-6);
  EXPECT_NEAR(fit.phase0, 0.4, 1e-6);
  EXPECT_NEAR(fit.visibility.value, 0.76, 1e-6);
  EXPECT_EQ(fit.dof, 8);
}

TEST(FringeFit, ConstantDataHasNoFringe) {
  const std::vector<double> p{0, 1, 2, 3, 4, 5};
  const std::vector<double> c(6, 20.0), s(6, 1.0);
  const auto fit = fit_fringe(p, c, s);
  EXPECT_NEAR(fit.amplitude, 0.0, 1e-9);
  EXPECT_NEAR(fit.visibility.value, 0.0, 1e-9);
  EXPECT_NEAR(fit.offset, 20.0, 1e-9);
}

TEST(FringeFit, InputValidation) {
  const std::vector<double> few{0, 1, 2, 3}, c4(4, 1.0);
  EXPECT_THROW(fit_fringe(few, c4, c4), std::invalid_argument);
  const std::vector<double> narrow{0, 0.5, 1, 1.5, 2, 2.5}, c6(6, 1.0);
  EXPECT_THROW(fit_fringe(narrow, c6, c6), std::invalid_argument);
  const std::vector<double> wide{0, 1, 2, 3, 4, 5}, bad{1, 1, 0, 1, 1, 1};
  EXPECT_THROW(fit_fringe(wide, c6, bad), std::invalid_argument);
}

TEST(FringeFit, CoverageOfThreeSigma) {
  std::mt19937_64 rng(2024);
  const int trials = 1000;
  int ok_a = 0, ok_b = 0, ok_phi = 0;
  for (int t = 0; t < trials; ++t) {
    const auto f = synthetic(50, 38, 1.1, 16, 2.0, &rng);
    const auto fit = fit_fringe(f.phases, f.counts, f.sigmas);
    const auto& c = fit.covariance;
    ok_a += std::abs(fit.offset - 50) < 3 * std::sqrt(c(0, 0));
    ok_b += std::abs(fit.amplitude - 38) < 3 * std::sqrt(c(1, 1));
    ok_phi += std::abs(wrap(fit.phase0 - 1.1)) < 3 * std::sqrt(c(2, 2));
  }
  EXPECT_GE(ok_a, 990);
  EXPECT_GE(ok_b, 990);
  EXPECT_GE(ok_phi, 990);
}

TEST(FringeFit, UnweightedWithChiSquaredScaling) {
  std::mt19937_64 rng(3);
  const auto f = synthetic(30, 20, -2.0, 12, 1.5, &rng);
  const auto fit = fit_fringe(f.phases, f.counts, f.sigmas, {false, true, 100});
  EXPECT_NEAR(fit.offset, 30, 3 * std::sqrt(fit.covariance(0, 0)));
  EXPECT_NEAR(fit.amplitude, 20, 3 * std::sqrt(fit.covariance(1, 1)));
  EXPECT_GT(fit.covariance(0, 0), 0.0);
}

TEST(CorrectedVisibility, FloorRemovesOffset) {
  const auto f = synthetic(50, 38, 0.0, 11, 0.0, nullptr);
  const auto fit = fit_fringe(f.phases, f.counts, f.sigmas);
  EXPECT_NEAR(corrected_visibility(fit, 0.0).value, fit.visibility.value, 1e-12);
  const auto v = corrected_visibility(fit, 10.0);
  EXPECT_NEAR(v.value, 38.0 / 40.0, 1e-9);
  EXPECT_THROW(corrected_visibility(fit, 50.0), std::invalid_argument);
}

TEST(CorrectedVisibility, RecoversGenuineVisibilityWithinOneSigma) {
  // A single draw lands within 1 sigma about 68% of the time.
  std::mt19937_64 rng(99);
  const double floor = 12.0;
  const int trials = 400;
  int within = 0;
  for (int t = 0; t < trials; ++t) {
    const auto f = synthetic(40 + floor, 36, 0.7, 21, 0.5, &rng);
    const auto v = corrected_visibility(fit_fringe(f.phases, f.counts, f.sigmas), floor);
    ASSERT_GT(v.sigma, 0.0);
    within += std::abs(v.value - 0.9) < v.sigma;
  }
  EXPECT_GT(within, 0.62 * trials);
  EXPECT_LT(within, 0.74 * trials);
}

TEST(SampleMean, MeanAndStd) {
  const std::vector<double> x{1, 2, 3, 4};
  const auto e = sample_mean(x);
  EXPECT_DOUBLE_EQ(e.value, 2.5);
  EXPECT_NEAR(e.sigma, std::sqrt(5.0 / 3.0), 1e-12);
}
