#include "qrouter/polarization.hpp"

#include <cmath>
#include <stdexcept>

namespace qrouter {

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

std::string_view to_string(Polarization p) { return p == Polarization::H ? "H" : "V"; }

Qubit Qubit::D() { return {kInvSqrt2, kInvSqrt2}; }
Qubit Qubit::A() { return {kInvSqrt2, -kInvSqrt2}; }
Qubit Qubit::R() { return {kInvSqrt2, Complex(0.0, kInvSqrt2)}; }
Qubit Qubit::L() { return {kInvSqrt2, Complex(0.0, -kInvSqrt2)}; }

Qubit Qubit::named(std::string_view name) {
  if (name == "H") return H();
  if (name == "V") return V();
  if (name == "D") return D();
  if (name == "A") return A();
  if (name == "R") return R();
  if (name == "L") return L();
  throw std::invalid_argument("unknown polarization state name '" + std::string(name) +
                              "' (expected one of H, V, D, A, R, L)");
}

Qubit Qubit::normalized() const {
  const double n = std::sqrt(squared_norm());
  if (n == 0.0) throw std::domain_error("cannot normalize the zero qubit");
  return {h / n, v / n};
}

bool Qubit::is_normalized(double tol) const { return std::abs(squared_norm() - 1.0) < tol; }

}  // namespace qrouter
