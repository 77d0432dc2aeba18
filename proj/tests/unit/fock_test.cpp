#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qrouter/fock.hpp"
#include "support/permanent.hpp"

using namespace qrouter;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// Six modes: paths P0..P2, H and V each.
ModeRegistry six_modes() { return ModeRegistry::from_paths({"P0", "P1", "P2"}); }

Occupation to_occ(const std::vector<int>& v) { return Occupation(v.begin(), v.end()); }

PhotonicState random_state(const ModeRegistry& reg, int photons, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  PhotonicState::Terms t;
  for (const auto& o : oracle::occupations(static_cast<int>(reg.size()), photons)) {
    if (g(rng) > 0.3) t[to_occ(o)] = {g(rng), g(rng)};
  }
  if (t.empty()) t[to_occ(oracle::occupations(static_cast<int>(reg.size()), photons).front())] = 1.0;
  return PhotonicState(reg, photons, std::move(t)).normalized();
}

ModeUnitary random_mode_unitary(const ModeRegistry& reg, std::mt19937_64& rng) {
  return ModeUnitary(reg.labels(), oracle::random_unitary(static_cast<int>(reg.size()), rng));
}

}  // namespace

TEST(ModeRegistry, FromPathsOrdersHThenV) {
  const auto reg = ModeRegistry::from_paths({"S", "C1"});
  ASSERT_EQ(reg.size(), 4u);
  EXPECT_EQ(reg[0], (ModeLabel{"S", Polarization::H}));
  EXPECT_EQ(reg[3], (ModeLabel{"C1", Polarization::V}));
  EXPECT_EQ(reg.require({"C1", Polarization::H}), 2u);
  EXPECT_THROW(reg.require({"X", Polarization::H}), std::invalid_argument);
}

TEST(ModeRegistry, RejectsDuplicatesAndTooManyModes) {
  EXPECT_THROW(ModeRegistry({{"S", Polarization::H}, {"S", Polarization::H}}), std::invalid_argument);
  std::vector<std::string> paths;
  for (int i = 0; i < 17; ++i) paths.push_back("P" + std::to_string(i));
  EXPECT_THROW(ModeRegistry::from_paths(paths), std::invalid_argument);
  paths.pop_back();
  EXPECT_EQ(ModeRegistry::from_paths(paths).size(), 32u);
}

TEST(PhotonicState, RejectsMixedPhotonNumbersAndCutoffViolations) {
  const auto reg = ModeRegistry::from_paths({"S"});
  EXPECT_THROW(PhotonicState(reg, 1, {{{1, 0}, 1.0}, {{1, 1}, 1.0}}), std::invalid_argument);
  EXPECT_THROW(PhotonicState(reg, 4, {{{4, 0}, 1.0}}), std::invalid_argument);
  EXPECT_NO_THROW(PhotonicState(reg, 4, {{{4, 0}, 1.0}}, 4));
  EXPECT_THROW(PhotonicState(reg, 1, {}, kMaxCutoff + 1), std::invalid_argument);
}

TEST(PhotonicState, NormalizeAndZeroVector) {
  const auto reg = ModeRegistry::from_paths({"S"});
  const PhotonicState s(reg, 1, {{{1, 0}, 3.0}, {{0, 1}, Complex(0, 4.0)}});
  EXPECT_NEAR(s.normalized().squared_norm(), 1.0, 1e-12);
  EXPECT_THROW(PhotonicState(reg, 1, {}).normalized(), std::domain_error);
}

TEST(PhotonicState, PrunesTinyAmplitudes) {
  const auto reg = ModeRegistry::from_paths({"S"});
  const PhotonicState s(reg, 1, {{{1, 0}, 1.0}, {{0, 1}, 1e-14}});
  EXPECT_EQ(s.terms().size(), 1u);
}

TEST(Tensor, ProductOfBasisStates) {
  const auto a = PhotonicState::single_photon("S", Qubit::H());
  const auto b = PhotonicState::single_photon("C1", Qubit::H());
  const auto ab = tensor(a, b);
  EXPECT_EQ(ab.photon_number(), 2);
  ASSERT_EQ(ab.terms().size(), 1u);
  EXPECT_NEAR(std::abs(ab.amplitude({1, 0, 1, 0}) - Complex(1.0)), 0.0, 1e-15);
}

TEST(Tensor, SuperpositionGivesTwoTerms) {
  const Qubit s{0.6, Complex(0, 0.8)};
  const auto ab = tensor(PhotonicState::single_photon("S", s), PhotonicState::single_photon("C1", Qubit::H()));
  ASSERT_EQ(ab.terms().size(), 2u);
  EXPECT_NEAR(std::abs(ab.amplitude({1, 0, 1, 0}) - s.h), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(ab.amplitude({0, 1, 1, 0}) - s.v), 0.0, 1e-15);
}

TEST(Tensor, ThreePhotonInput) {
  const auto in = tensor(tensor(PhotonicState::single_photon("S_IN", Qubit::D()),
                                PhotonicState::single_photon("C1", Qubit::R())),
                         PhotonicState::single_photon("C2", Qubit::L()));
  EXPECT_EQ(in.photon_number(), 3);
  EXPECT_EQ(in.terms().size(), 8u);
  EXPECT_NEAR(in.squared_norm(), 1.0, 1e-12);
}

TEST(Tensor, OverlappingRegistriesRejected) {
  const auto a = PhotonicState::single_photon("S", Qubit::H());
  EXPECT_THROW(tensor(a, a), std::invalid_argument);
}

TEST(ModeUnitary, Validation) {
  const std::vector<ModeLabel> m{{"a", Polarization::H}, {"b", Polarization::H}};
  Eigen::MatrixXcd bad(2, 2);
  bad << 1, 1, 0, 1;
  EXPECT_THROW(ModeUnitary(m, bad), std::invalid_argument);
  EXPECT_THROW(ModeUnitary(m, Eigen::MatrixXcd::Identity(3, 3)), std::invalid_argument);
  EXPECT_THROW(ModeUnitary({m[0], m[0]}, Eigen::MatrixXcd::Identity(2, 2)), std::invalid_argument);
}

TEST(ApplyUnitary, HongOuMandel) {
  const auto reg = ModeRegistry({{"a", Polarization::H}, {"b", Polarization::H}});
  Eigen::MatrixXcd bs(2, 2);
  bs << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  const auto out = apply_unitary(PhotonicState::basis(reg, {1, 1}), ModeUnitary(reg.labels(), bs));
  EXPECT_NEAR(std::abs(out.amplitude({1, 1})), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out.amplitude({2, 0})), kInvSqrt2, 1e-12);
  EXPECT_NEAR(std::abs(out.amplitude({0, 2})), kInvSqrt2, 1e-12);
  EXPECT_NEAR(std::abs(out.amplitude({2, 0}) + out.amplitude({0, 2})), 0.0, 1e-12);
}

TEST(ApplyUnitary, IdentityLeavesStateUnchanged) {
  std::mt19937_64 rng(3);
  const auto s = random_state(six_modes(), 3, rng);
  const auto out = apply_unitary(s, ModeUnitary::identity(s.registry().labels()));
  EXPECT_NEAR(std::abs(inner_product(s, out) - Complex(1.0)), 0.0, 1e-12);
}

TEST(ApplyUnitary, UnknownModeRejected) {
  const auto s = PhotonicState::single_photon("S", Qubit::H());
  EXPECT_THROW(apply_unitary(s, ModeUnitary::identity({{"X", Polarization::H}})), std::invalid_argument);
}

TEST(ApplyUnitary, MatchesPermanentOracle) {
  std::mt19937_64 rng(11);
  const auto reg = ModeRegistry::from_paths({"P0", "P1"});
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXcd u = oracle::random_unitary(4, rng);
    const std::vector<int> in{1, 0, 2, 0};
    const auto out = apply_unitary(PhotonicState::basis(reg, to_occ(in)), ModeUnitary(reg.labels(), u));
    for (const auto& o : oracle::occupations(4, 3)) {
      EXPECT_NEAR(std::abs(out.amplitude(to_occ(o)) - oracle::transition_amplitude(u, in, o)), 0.0, 1e-10);
    }
  }
}

TEST(ApplyUnitary, SubsetOfModesLeavesOthersAlone) {
  std::mt19937_64 rng(5);
  const auto reg = six_modes();
  const Eigen::MatrixXcd u = oracle::random_unitary(2, rng);
  const ModeUnitary mu({reg[2], reg[3]}, u);
  const auto out = apply_unitary(PhotonicState::basis(reg, {1, 0, 1, 0, 0, 1}), mu);
  EXPECT_NEAR(std::abs(out.amplitude({1, 0, 1, 0, 0, 1}) - u(0, 0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(out.amplitude({1, 0, 0, 1, 0, 1}) - u(1, 0)), 0.0, 1e-12);
}

TEST(ApplyUnitary, PreservesNorm) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_state(six_modes(), 1 + trial % 3, rng);
    const auto out = apply_unitary(s, random_mode_unitary(s.registry(), rng));
    EXPECT_NEAR(std::sqrt(out.squared_norm()), std::sqrt(s.squared_norm()), 1e-12);
  }
}

TEST(ApplyUnitary, ComposesAsMatrixProduct) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = random_state(six_modes(), 3, rng);
    const auto u = random_mode_unitary(s.registry(), rng);
    const auto v = random_mode_unitary(s.registry(), rng);
    const auto seq = apply_unitary(apply_unitary(s, u), v);
    const auto once = apply_unitary(s, u.then(v));
    for (const auto& o : oracle::occupations(6, 3)) {
      EXPECT_NEAR(std::abs(seq.amplitude(to_occ(o)) - once.amplitude(to_occ(o))), 0.0, 1e-10);
    }
  }
}

TEST(InnerProduct, PolarizationStates) {
  auto ip = [](const Qubit& a, const Qubit& b) {
    return inner_product(PhotonicState::single_photon("S", a), PhotonicState::single_photon("S", b));
  };
  EXPECT_NEAR(std::abs(ip(Qubit::H(), Qubit::H()) - Complex(1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(ip(Qubit::H(), Qubit::V())), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(ip(Qubit::D(), Qubit::R()) - Complex(0.5, 0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(ip(Qubit::R(), Qubit::D()) - Complex(0.5, -0.5)), 0.0, 1e-15);
}

TEST(InnerProduct, RegistryOrPhotonNumberMismatchRejected) {
  const auto a = PhotonicState::single_photon("S", Qubit::H());
  const auto b = PhotonicState::single_photon("T", Qubit::H());
  EXPECT_THROW(inner_product(a, b), std::invalid_argument);
  EXPECT_THROW(inner_product(a, PhotonicState::vacuum(a.registry())), std::invalid_argument);
}

TEST(InnerProduct, SelfOverlapIsRealNonNegative) {
  std::mt19937_64 rng(2);
  const auto s = random_state(six_modes(), 2, rng).scaled(Complex(0.3, 0.7));
  const Complex n = inner_product(s, s);
  EXPECT_NEAR(n.imag(), 0.0, 1e-15);
  EXPECT_GT(n.real(), 0.0);
}

TEST(PhotonicState, ExtendAndRestrictRoundTrip) {
  const auto s = PhotonicState::single_photon("S", Qubit::R());
  const auto big = ModeRegistry::from_paths({"T", "S"});
  const auto e = s.extended_to(big);
  EXPECT_EQ(e.registry(), big);
  const auto back = e.restricted_to(s.registry());
  EXPECT_NEAR(phase_insensitive_distance(s, back), 0.0, 1e-15);
  const auto t = PhotonicState::single_photon("T", Qubit::H()).extended_to(big);
  EXPECT_THROW(t.restricted_to(s.registry()), std::invalid_argument);
}
