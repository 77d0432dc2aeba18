#include "qrouter/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace qrouter {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

void prune(PhotonicState::Terms& terms) {
  std::erase_if(terms, [](const auto& kv) { return std::abs(kv.second) < kPruneTolerance; });
}

int total_photons(const Occupation& occ) {
  return std::accumulate(occ.begin(), occ.end(), 0);
}

}  // namespace

std::string to_string(const ModeLabel& m) {
  return m.path + "/" + std::string(to_string(m.polarization));
}

// ---------------------------------------------------------------------------
// ModeRegistry

ModeRegistry::ModeRegistry(std::vector<ModeLabel> modes) : modes_(std::move(modes)) {
  if (modes_.size() > kMaxModes) {
    throw std::invalid_argument(fmt::format("mode registry holds {} modes; the limit is {}",
                                            modes_.size(), kMaxModes));
  }
  std::set<ModeLabel> seen;
  for (const auto& m : modes_) {
    if (!seen.insert(m).second) {
      throw std::invalid_argument("duplicate mode label " + to_string(m));
    }
  }
}

ModeRegistry ModeRegistry::from_paths(std::span<const std::string> paths) {
  std::vector<ModeLabel> modes;
  modes.reserve(2 * paths.size());
  for (const auto& p : paths) {
    modes.push_back({p, Polarization::H});
    modes.push_back({p, Polarization::V});
  }
  return ModeRegistry(std::move(modes));
}

ModeRegistry ModeRegistry::from_paths(std::initializer_list<std::string> paths) {
  return from_paths(std::span<const std::string>(paths.begin(), paths.size()));
}

std::optional<std::size_t> ModeRegistry::index_of(const ModeLabel& m) const {
  auto it = std::find(modes_.begin(), modes_.end(), m);
  if (it == modes_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - modes_.begin());
}

std::size_t ModeRegistry::require(const ModeLabel& m) const {
  if (auto i = index_of(m)) return *i;
  throw std::invalid_argument("unknown mode " + to_string(m));
}

bool ModeRegistry::has_path(const std::string& path) const {
  return std::any_of(modes_.begin(), modes_.end(), [&](const ModeLabel& m) { return m.path == path; });
}

std::vector<std::string> ModeRegistry::paths() const {
  std::vector<std::string> out;
  for (const auto& m : modes_) {
    if (std::find(out.begin(), out.end(), m.path) == out.end()) out.push_back(m.path);
  }
  return out;
}

ModeRegistry ModeRegistry::merged_with(const ModeRegistry& other) const {
  std::vector<ModeLabel> modes = modes_;
  for (const auto& m : other.modes_) {
    if (contains(m)) throw std::invalid_argument("registries overlap on mode " + to_string(m));
    modes.push_back(m);
  }
  return ModeRegistry(std::move(modes));
}

// ---------------------------------------------------------------------------
// PhotonicState

PhotonicState::PhotonicState(ModeRegistry registry, int photon_number, Terms terms, int cutoff)
    : registry_(std::move(registry)), photon_number_(photon_number), cutoff_(cutoff), terms_(std::move(terms)) {
  if (cutoff_ < 0 || cutoff_ > kMaxCutoff) {
    throw std::invalid_argument(fmt::format("photon cutoff {} outside [0, {}]", cutoff_, kMaxCutoff));
  }
  if (photon_number_ < 0 || photon_number_ > cutoff_) {
    throw std::invalid_argument(
        fmt::format("photon number {} exceeds the cutoff {}", photon_number_, cutoff_));
  }
  for (const auto& [occ, amp] : terms_) {
    if (occ.size() != registry_.size()) {
      throw std::invalid_argument("occupation length does not match the mode registry");
    }
    if (total_photons(occ) != photon_number_) {
      throw std::invalid_argument("all occupations must carry the same total photon number");
    }
  }
  prune(terms_);
}

PhotonicState PhotonicState::vacuum(ModeRegistry registry) {
  Occupation occ(registry.size(), 0);
  Terms t{{occ, Complex(1.0)}};
  return PhotonicState(std::move(registry), 0, std::move(t));
}

PhotonicState PhotonicState::single_photon(const std::string& path, const Qubit& q) {
  ModeRegistry reg = ModeRegistry::from_paths({path});
  Terms t;
  t[{1, 0}] = q.h;
  t[{0, 1}] = q.v;
  return PhotonicState(std::move(reg), 1, std::move(t));
}

PhotonicState PhotonicState::basis(ModeRegistry registry, Occupation occupation, int cutoff) {
  const int n = total_photons(occupation);
  Terms t{{std::move(occupation), Complex(1.0)}};
  return PhotonicState(std::move(registry), n, std::move(t), cutoff);
}

Complex PhotonicState::amplitude(const Occupation& occupation) const {
  auto it = terms_.find(occupation);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

double PhotonicState::squared_norm() const {
  double s = 0.0;
  for (const auto& [occ, amp] : terms_) s += std::norm(amp);
  return s;
}

PhotonicState PhotonicState::normalized() const {
  const double n = std::sqrt(squared_norm());
  if (n == 0.0) throw std::domain_error("cannot normalize the zero state");
  return scaled(Complex(1.0 / n));
}

PhotonicState PhotonicState::scaled(Complex factor) const {
  Terms t = terms_;
  for (auto& [occ, amp] : t) amp *= factor;
  return PhotonicState(registry_, photon_number_, std::move(t), cutoff_);
}

PhotonicState PhotonicState::with_cutoff(int cutoff) const {
  return PhotonicState(registry_, photon_number_, terms_, cutoff);
}

PhotonicState PhotonicState::extended_to(const ModeRegistry& target) const {
  std::vector<std::size_t> where(registry_.size());
  for (std::size_t i = 0; i < registry_.size(); ++i) where[i] = target.require(registry_[i]);
  Terms t;
  for (const auto& [occ, amp] : terms_) {
    Occupation o(target.size(), 0);
    for (std::size_t i = 0; i < occ.size(); ++i) o[where[i]] = occ[i];
    t.emplace(std::move(o), amp);
  }
  return PhotonicState(target, photon_number_, std::move(t), cutoff_);
}

PhotonicState PhotonicState::restricted_to(const ModeRegistry& target) const {
  std::vector<std::size_t> from(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) from[i] = registry_.require(target[i]);
  Terms t;
  for (const auto& [occ, amp] : terms_) {
    Occupation o(target.size(), 0);
    int kept = 0;
    for (std::size_t i = 0; i < target.size(); ++i) {
      o[i] = occ[from[i]];
      kept += o[i];
    }
    if (kept != photon_number_) {
      throw std::invalid_argument("cannot restrict: a term has photons outside the target registry");
    }
    t.emplace(std::move(o), amp);
  }
  return PhotonicState(target, photon_number_, std::move(t), cutoff_);
}

std::string PhotonicState::to_string(int precision) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [occ, amp] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << fmt::format("({:.{}g}{:+.{}g}i)|", amp.real(), precision, amp.imag(), precision);
    bool any = false;
    for (std::size_t i = 0; i < occ.size(); ++i) {
      if (occ[i] == 0) continue;
      if (any) os << ",";
      any = true;
      os << static_cast<int>(occ[i]) << ":" << qrouter::to_string(registry_[i]);
    }
    if (!any) os << "vac";
    os << ">";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// ModeUnitary

double unitarity_error(const Eigen::MatrixXcd& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  const Eigen::MatrixXcd d = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

ModeUnitary::ModeUnitary(std::vector<ModeLabel> modes, Eigen::MatrixXcd matrix)
    : modes_(std::move(modes)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || static_cast<std::size_t>(matrix_.rows()) != modes_.size()) {
    throw std::invalid_argument("unitary matrix shape does not match its mode list");
  }
  std::set<ModeLabel> seen(modes_.begin(), modes_.end());
  if (seen.size() != modes_.size()) throw std::invalid_argument("unitary mode list has duplicates");
  const double err = modes_.empty() ? 0.0 : unitarity_error(matrix_);
  if (!(err < kUnitarityTolerance)) {
    throw std::invalid_argument(fmt::format("matrix is not unitary (max |U^dag U - I| = {:.3g})", err));
  }
}

ModeUnitary ModeUnitary::identity(std::vector<ModeLabel> modes) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  return ModeUnitary(std::move(modes), Eigen::MatrixXcd::Identity(n, n));
}

ModeUnitary ModeUnitary::then(const ModeUnitary& next) const {
  if (next.modes_ != modes_) throw std::invalid_argument("composed unitaries must act on the same modes");
  return ModeUnitary(modes_, next.matrix_ * matrix_);
}

// ---------------------------------------------------------------------------
// Operations

PhotonicState tensor(const PhotonicState& a, const PhotonicState& b) {
  ModeRegistry reg = a.registry().merged_with(b.registry());
  PhotonicState::Terms t;
  for (const auto& [oa, xa] : a.terms()) {
    for (const auto& [ob, xb] : b.terms()) {
      Occupation o = oa;
      o.insert(o.end(), ob.begin(), ob.end());
      t.emplace(std::move(o), xa * xb);
    }
  }
  const int cutoff = std::max(a.cutoff(), b.cutoff());
  return PhotonicState(std::move(reg), a.photon_number() + b.photon_number(), std::move(t), cutoff);
}

PhotonicState apply_unitary(const PhotonicState& state, const ModeUnitary& u) {
  const auto& reg = state.registry();
  const auto& m = u.matrix();
  const std::size_t k = u.modes().size();
  std::vector<std::size_t> idx(k);
  for (std::size_t j = 0; j < k; ++j) idx[j] = reg.require(u.modes()[j]);

  // Nonzero entries per input column, so that permutation-like elements
  // expand in O(1) per photon.
  std::vector<std::vector<std::pair<std::size_t, Complex>>> column(k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t r = 0; r < k; ++r) {
      const Complex x = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
      if (x != Complex(0.0)) column[j].emplace_back(r, x);
    }
  }

  PhotonicState::Terms out;
  std::vector<std::size_t> photons;
  std::map<Occupation, Complex> expansion;
  Occupation local(k, 0);

  for (const auto& [occ, amp] : state.terms()) {
    photons.clear();
    double in_factorials = 1.0;
    Occupation base = occ;
    for (std::size_t j = 0; j < k; ++j) {
      const int n = occ[idx[j]];
      for (int t = 0; t < n; ++t) photons.push_back(j);
      in_factorials *= factorial(n);
      base[idx[j]] = 0;
    }

    expansion.clear();
    std::fill(local.begin(), local.end(), 0);
    // Depth-first over the output mode of each photon.
    auto expand = [&](auto&& self, std::size_t p, Complex coeff) -> void {
      if (p == photons.size()) {
        expansion[local] += coeff;
        return;
      }
      for (const auto& [r, x] : column[photons[p]]) {
        ++local[r];
        self(self, p + 1, coeff * x);
        --local[r];
      }
    };
    expand(expand, 0, Complex(1.0));

    for (const auto& [lo, coeff] : expansion) {
      double out_factorials = 1.0;
      Occupation o = base;
      for (std::size_t r = 0; r < k; ++r) {
        o[idx[r]] = lo[r];
        out_factorials *= factorial(lo[r]);
      }
      out[o] += amp * coeff * std::sqrt(out_factorials / in_factorials);
    }
  }
  return PhotonicState(reg, state.photon_number(), std::move(out), state.cutoff());
}

Complex inner_product(const PhotonicState& a, const PhotonicState& b) {
  if (!(a.registry() == b.registry())) throw std::invalid_argument("inner product over different mode registries");
  if (a.photon_number() != b.photon_number()) {
    throw std::invalid_argument("inner product between different photon-number sectors");
  }
  Complex s(0.0);
  const auto& small = a.terms().size() <= b.terms().size() ? a.terms() : b.terms();
  for (const auto& [occ, x] : small) {
    s += std::conj(a.amplitude(occ)) * b.amplitude(occ);
  }
  return s;
}

double phase_insensitive_distance(const PhotonicState& a, const PhotonicState& b) {
  return 1.0 - std::abs(inner_product(a, b));
}

}  // namespace qrouter
