#pragma once

// Sparse Fock-space representation of few-photon states over labeled
// (spatial path, polarization) modes, and their evolution under passive
// linear-optical unitaries.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qrouter/polarization.hpp"

namespace qrouter {

struct ModeLabel {
  std::string path;
  Polarization polarization = Polarization::H;

  friend auto operator<=>(const ModeLabel&, const ModeLabel&) = default;
  friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
};

std::string to_string(const ModeLabel& m);

/// Ordered set of unique mode labels. Occupation vectors are indexed by
/// position in the registry.
class ModeRegistry {
 public:
  static constexpr std::size_t kMaxModes = 32;

  ModeRegistry() = default;
  explicit ModeRegistry(std::vector<ModeLabel> modes);

  /// H and V modes for each path, in the given order.
  static ModeRegistry from_paths(std::span<const std::string> paths);
  static ModeRegistry from_paths(std::initializer_list<std::string> paths);

  std::size_t size() const { return modes_.size(); }
  const std::vector<ModeLabel>& labels() const { return modes_; }
  const ModeLabel& operator[](std::size_t i) const { return modes_[i]; }

  std::optional<std::size_t> index_of(const ModeLabel& m) const;
  /// Throws std::invalid_argument if the mode is not registered.
  std::size_t require(const ModeLabel& m) const;
  bool contains(const ModeLabel& m) const { return index_of(m).has_value(); }
  bool has_path(const std::string& path) const;
  std::vector<std::string> paths() const;

  /// Concatenation of two disjoint registries. Throws on overlap.
  ModeRegistry merged_with(const ModeRegistry& other) const;

  friend bool operator==(const ModeRegistry&, const ModeRegistry&) = default;

 private:
  std::vector<ModeLabel> modes_;
};

using Occupation = std::vector<std::uint8_t>;

inline constexpr int kDefaultCutoff = 3;
inline constexpr int kMaxCutoff = 6;
inline constexpr double kPruneTolerance = 1e-12;

/// Superposition of Fock occupations sharing one total photon number.
///
/// Immutable after construction; every operation returns a new state. An
/// empty term map is the zero vector (used for failed projections).
class PhotonicState {
 public:
  using Terms = std::map<Occupation, Complex>;

  /// Zero vector over an empty registry.
  PhotonicState() = default;
  PhotonicState(ModeRegistry registry, int photon_number, Terms terms,
                int cutoff = kDefaultCutoff);

  static PhotonicState vacuum(ModeRegistry registry);
  /// One photon on `path` in polarization state `q` (registry: path/H, path/V).
  static PhotonicState single_photon(const std::string& path, const Qubit& q);
  static PhotonicState basis(ModeRegistry registry, Occupation occupation,
                             int cutoff = kDefaultCutoff);

  const ModeRegistry& registry() const { return registry_; }
  int photon_number() const { return photon_number_; }
  int cutoff() const { return cutoff_; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  Complex amplitude(const Occupation& occupation) const;
  double squared_norm() const;
  /// Throws std::domain_error on the zero vector.
  PhotonicState normalized() const;
  PhotonicState scaled(Complex factor) const;
  PhotonicState with_cutoff(int cutoff) const;

  /// Embeds the state into a registry containing all of its modes; new modes are vacuum.
  PhotonicState extended_to(const ModeRegistry& target) const;
  /// Drops modes outside `target`. Throws if any term has photons in a dropped mode.
  PhotonicState restricted_to(const ModeRegistry& target) const;

  std::string to_string(int precision = 6) const;

 private:
  ModeRegistry registry_;
  int photon_number_ = 0;
  int cutoff_ = kDefaultCutoff;
  Terms terms_;
};

/// Unitary acting on an ordered subset of modes. Column j is the image of
/// mode j: a_j^dagger -> sum_k U(k, j) a_k^dagger.
class ModeUnitary {
 public:
  static constexpr double kUnitarityTolerance = 1e-12;

  /// Throws std::invalid_argument on shape mismatch, duplicate modes, or a
  /// non-unitary matrix.
  ModeUnitary(std::vector<ModeLabel> modes, Eigen::MatrixXcd matrix);

  static ModeUnitary identity(std::vector<ModeLabel> modes);

  const std::vector<ModeLabel>& modes() const { return modes_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }

  /// `next` applied after this; both must act on the same ordered modes.
  ModeUnitary then(const ModeUnitary& next) const;

 private:
  std::vector<ModeLabel> modes_;
  Eigen::MatrixXcd matrix_;
};

/// max_ij |(U^dagger U - I)_ij|
double unitarity_error(const Eigen::MatrixXcd& u);

/// Product state over disjoint registries. Throws std::invalid_argument on overlap.
PhotonicState tensor(const PhotonicState& a, const PhotonicState& b);

/// Evolves by the multi-photon representation of `u`, via creation-operator
/// substitution. Amplitudes below kPruneTolerance are dropped.
PhotonicState apply_unitary(const PhotonicState& state, const ModeUnitary& u);

/// <a|b>. Throws std::invalid_argument if registries or photon numbers differ.
Complex inner_product(const PhotonicState& a, const PhotonicState& b);

/// 1 - |<a|b>| for normalized states; zero iff equal up to global phase.
double phase_insensitive_distance(const PhotonicState& a, const PhotonicState& b);

}  // namespace qrouter
