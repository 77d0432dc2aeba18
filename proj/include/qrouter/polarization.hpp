#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

namespace qrouter {

using Complex = std::complex<double>;

enum class Polarization : std::uint8_t { H = 0, V = 1 };

std::string_view to_string(Polarization p);

/// Polarization qubit h|H> + v|V>.
///
/// Named states follow |D> = (|H>+|V>)/sqrt2, |A> = (|H>-|V>)/sqrt2,
/// |R> = (|H>+i|V>)/sqrt2, |L> = (|H>-i|V>)/sqrt2.
struct Qubit {
  Complex h{1.0, 0.0};
  Complex v{0.0, 0.0};

  static Qubit H() { return {1.0, 0.0}; }
  static Qubit V() { return {0.0, 1.0}; }
  static Qubit D();
  static Qubit A();
  static Qubit R();
  static Qubit L();

  /// One of "H", "V", "D", "A", "R", "L". Throws std::invalid_argument otherwise.
  static Qubit named(std::string_view name);

  double squared_norm() const { return std::norm(h) + std::norm(v); }
  Qubit normalized() const;
  bool is_normalized(double tol = 1e-12) const;

  /// The state orthogonal to this one, -conj(v)|H> + conj(h)|V>.
  Qubit orthogonal() const { return {-std::conj(v), std::conj(h)}; }

  Complex component(Polarization p) const { return p == Polarization::H ? h : v; }
};

/// <a|b>
inline Complex overlap(const Qubit& a, const Qubit& b) {
  return std::conj(a.h) * b.h + std::conj(a.v) * b.v;
}

/// |<a|b>|^2 for normalized qubits; the pure-state fidelity.
inline double qubit_fidelity(const Qubit& a, const Qubit& b) {
  return std::norm(overlap(a, b));
}

inline constexpr std::string_view kProbeStateNames[] = {"H", "V", "D", "A", "R", "L"};

}  // namespace qrouter
