#pragma once

// Independent multi-photon amplitude oracle: the permanent formula
//   <m|U|n> = Per(U[m, n]) / sqrt(prod n_i! prod m_j!)
// where U[m, n] repeats row j m_j times and column i n_i times.
// Brute force over permutations; fine for the <= 4 photons used in tests.

#include <algorithm>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline std::complex<double> permanent(const Eigen::MatrixXcd& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 0) return 1.0;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::complex<double> total = 0.0;
  do {
    std::complex<double> prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= m(i, perm[i]);
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Column i of u is the image of mode i.
inline std::complex<double> transition_amplitude(const Eigen::MatrixXcd& u, const std::vector<int>& in,
                                                 const std::vector<int>& out) {
  std::vector<int> rows, cols;
  double norm = 1.0;
  for (int j = 0; j < static_cast<int>(out.size()); ++j) {
    for (int k = 0; k < out[j]; ++k) rows.push_back(j);
    norm *= factorial(out[j]);
  }
  for (int i = 0; i < static_cast<int>(in.size()); ++i) {
    for (int k = 0; k < in[i]; ++k) cols.push_back(i);
    norm *= factorial(in[i]);
  }
  if (rows.size() != cols.size()) return 0.0;
  Eigen::MatrixXcd sub(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) sub(r, c) = u(rows[r], cols[c]);
  }
  return permanent(sub) / std::sqrt(norm);
}

/// Haar-random unitary (QR of a complex Gaussian matrix, phases fixed).
inline Eigen::MatrixXcd random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd z(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) z(i, j) = {g(rng), g(rng)};
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) q.col(i) *= std::polar(1.0, std::arg(r(i, i)));
  return q;
}

/// All occupations of `modes` modes with `photons` photons in total.
inline std::vector<std::vector<int>> occupations(int modes, int photons) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(modes, 0);
  auto rec = [&](auto&& self, int m, int left) -> void {
    if (m == modes - 1) {
      cur[m] = left;
      out.push_back(cur);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      cur[m] = k;
      self(self, m + 1, left - k);
    }
  };
  if (modes > 0) rec(rec, 0, photons);
  return out;
}

}  // namespace oracle
