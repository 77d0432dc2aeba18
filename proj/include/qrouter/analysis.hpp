#pragma once

// Estimators turning coincidence counts into routing probabilities,
// fidelities, contrasts and fringe visibilities, with first-order error
// propagation from Poissonian counts.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qrouter/polarization.hpp"
#include "qrouter/source_noise.hpp"

namespace qrouter {

struct Estimate {
  double value = 0.0;
  double sigma = 0.0;
};

/// P2 = cc2 / (cc1 + cc2) with sigma^2 = cc1 cc2 / N^3. Counts may be
/// non-integer (corrected). Throws std::invalid_argument when cc1 + cc2 <= 0.
Estimate routing_probability(double cc1, double cc2);
/// Same for counts carrying their own uncertainties.
Estimate routing_probability(const Estimate& cc1, const Estimate& cc2);

struct CorrectedCounts {
  Estimate cc1;
  Estimate cc2;
};

/// raw - accidental, not clamped at zero. sigma^2 = raw + accidental
/// (Poisson error of the raw count and of the accidental estimate).
CorrectedCounts subtract_accidentals(const CountRecord& raw);

/// F = R / (1 + R) with R = n_parallel / n_orthogonal; F = 1 when
/// n_orthogonal = 0. Throws std::invalid_argument for negative or all-zero counts.
Estimate fidelity_from_counts(double n_parallel, double n_orthogonal);

/// 2x2 density matrix over {H, V}.
class PolarizationDensity {
 public:
  static constexpr double kTolerance = 1e-12;

  /// Throws std::invalid_argument unless Hermitian, unit trace and positive
  /// semidefinite within kTolerance.
  explicit PolarizationDensity(const Eigen::Matrix2cd& rho);
  static PolarizationDensity pure(const Qubit& q);
  static PolarizationDensity maximally_mixed();

  const Eigen::Matrix2cd& matrix() const { return rho_; }
  /// <q|rho|q> for normalized q.
  double expectation(const Qubit& q) const;

 private:
  Eigen::Matrix2cd rho_;
};

double fidelity_from_state(const PolarizationDensity& rho, const Qubit& target);

/// P2 for one probe state under both control settings.
struct ContrastEntry {
  std::string state;
  Estimate p2_off;
  Estimate p2_on;
};

struct PortContrast {
  /// Mean over bounded states; sigma is the sample standard deviation.
  Estimate mean;
  std::vector<double> per_state;
  /// States whose denominator was not positive; excluded from the mean.
  std::vector<std::string> unbounded;
};

struct ContrastSummary {
  /// (1 - P2(OFF)) / (1 - P2(ON))
  PortContrast port1;
  /// P2(ON) / P2(OFF)
  PortContrast port2;
};

ContrastSummary contrast_summary(std::span<const ContrastEntry> table);

struct FringeFit {
  double offset = 0.0;     // A
  double amplitude = 0.0;  // B >= 0
  double phase0 = 0.0;     // in (-pi, pi]
  Estimate visibility;     // B / A
  double chi2 = 0.0;
  int dof = 0;
  /// Covariance of (A, B, phase0).
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  int iterations = 0;
  /// False when the bounded Gauss-Newton iteration gave up and the exact
  /// linear solve was used instead.
  bool nonlinear_converged = true;
};

struct FitOptions {
  /// Weight residuals by 1/sigma^2. Without weights every point counts equally.
  bool weighted = true;
  /// Scale the covariance by chi2/dof. Needed for unweighted fits.
  bool scale_by_reduced_chi2 = false;
  int max_iterations = 100;
};

class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

/// Least-squares fit of c(phi) = A + B cos(phi - phi0). Needs at least five
/// samples spanning more than pi; sigmas must be positive when weighted.
/// Throws std::invalid_argument on bad input, FitError if no finite solution exists.
FringeFit fit_fringe(std::span<const double> phases, std::span<const double> counts, std::span<const double> sigmas,
                     const FitOptions& options = {});

/// B / (A - noise_floor). Throws std::invalid_argument if noise_floor >= A.
Estimate corrected_visibility(const FringeFit& fit, double noise_floor);

/// Mean of the twelve (6 states x 2 settings) fidelities; sigma is the
/// sample standard deviation. Throws std::invalid_argument otherwise.
Estimate mean_fidelity(std::span<const Estimate> table);

/// Arithmetic mean and sample standard deviation.
Estimate sample_mean(std::span<const double> values);

}  // namespace qrouter
