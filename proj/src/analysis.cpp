#include "qrouter/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace qrouter {

Estimate routing_probability(double cc1, double cc2) {
  return routing_probability(Estimate{cc1, std::sqrt(std::max(0.0, cc1))}, Estimate{cc2, std::sqrt(std::max(0.0, cc2))});
}

Estimate routing_probability(const Estimate& cc1, const Estimate& cc2) {
  const double n = cc1.value + cc2.value;
  if (!(n > 0.0)) throw std::invalid_argument("routing probability needs a positive total count");
  const double n2 = n * n;
  // dP2/dcc1 = -cc2/N^2, dP2/dcc2 = cc1/N^2
  const double var = (cc2.value * cc2.value * cc1.sigma * cc1.sigma + cc1.value * cc1.value * cc2.sigma * cc2.sigma) /
                     (n2 * n2);
  return {cc2.value / n, std::sqrt(var)};
}

CorrectedCounts subtract_accidentals(const CountRecord& raw) {
  auto one = [](double counts, double acc) {
    if (acc < 0.0) throw std::invalid_argument("accidental estimate must be >= 0");
    return Estimate{counts - acc, std::sqrt(counts + acc)};
  };
  return {one(static_cast<double>(raw.cc1), raw.accidental_cc1), one(static_cast<double>(raw.cc2), raw.accidental_cc2)};
}

Estimate fidelity_from_counts(double n_parallel, double n_orthogonal) {
  if (n_parallel < 0.0 || n_orthogonal < 0.0) throw std::invalid_argument("counts must be >= 0");
  const double n = n_parallel + n_orthogonal;
  if (!(n > 0.0)) throw std::invalid_argument("fidelity needs at least one count");
  // R/(1+R) = n_par/N; sigma as for a binomial fraction.
  const double f = n_orthogonal == 0.0 ? 1.0 : n_parallel / n;
  return {f, std::sqrt(n_parallel * n_orthogonal / (n * n * n))};
}

PolarizationDensity::PolarizationDensity(const Eigen::Matrix2cd& rho) : rho_(rho) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kTolerance) throw std::invalid_argument("density is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > kTolerance) throw std::invalid_argument("density trace is not 1");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho);
  if (es.eigenvalues().minCoeff() < -kTolerance) throw std::invalid_argument("density has a negative eigenvalue");
}

PolarizationDensity PolarizationDensity::pure(const Qubit& q) {
  if (!q.is_normalized()) throw std::invalid_argument("pure state must be normalized");
  Eigen::Vector2cd v(q.h, q.v);
  return PolarizationDensity(v * v.adjoint());
}

PolarizationDensity PolarizationDensity::maximally_mixed() {
  return PolarizationDensity(Eigen::Matrix2cd::Identity() * 0.5);
}

double PolarizationDensity::expectation(const Qubit& q) const {
  Eigen::Vector2cd v(q.h, q.v);
  return (v.adjoint() * rho_ * v)(0, 0).real();
}

double fidelity_from_state(const PolarizationDensity& rho, const Qubit& target) {
  if (!target.is_normalized()) throw std::invalid_argument("target state must be normalized");
  return rho.expectation(target);
}

Estimate sample_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty set");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

ContrastSummary contrast_summary(std::span<const ContrastEntry> table) {
  if (table.empty()) throw std::invalid_argument("contrast table is empty");
  ContrastSummary out;
  auto add = [](PortContrast& pc, const std::string& state, double num, double den) {
    if (den > 0.0) {
      pc.per_state.push_back(num / den);
    } else {
      pc.unbounded.push_back(state);
    }
  };
  for (const auto& e : table) {
    add(out.port1, e.state, 1.0 - e.p2_off.value, 1.0 - e.p2_on.value);
    add(out.port2, e.state, e.p2_on.value, e.p2_off.value);
  }
  for (PortContrast* pc : {&out.port1, &out.port2}) {
    if (!pc->per_state.empty()) {
      pc->mean = sample_mean(pc->per_state);
    } else {
      pc->mean = {std::numeric_limits<double>::infinity(), 0.0};
    }
  }
  return out;
}

namespace {

double wrap_phase(double x) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  x = std::remainder(x, kTwoPi);
  if (x <= -std::numbers::pi) x += kTwoPi;
  return x;
}

struct FitProblem {
  Eigen::VectorXd phi, y, w;

  Eigen::VectorXd residuals(const Eigen::Vector3d& p) const {
    return y - (p(0) + p(1) * (phi.array() - p(2)).cos()).matrix();
  }
  double chi2(const Eigen::Vector3d& p) const { return (residuals(p).array().square() * w.array()).sum(); }
  Eigen::MatrixXd jacobian(const Eigen::Vector3d& p) const {
    Eigen::MatrixXd j(phi.size(), 3);
    j.col(0).setOnes();
    j.col(1) = (phi.array() - p(2)).cos();
    j.col(2) = p(1) * (phi.array() - p(2)).sin();
    return j;
  }
};

// Exact solution of the model written as A + c cos(phi) + s sin(phi).
Eigen::Vector3d linear_solution(const FitProblem& f) {
  Eigen::MatrixXd x(f.phi.size(), 3);
  x.col(0).setOnes();
  x.col(1) = f.phi.array().cos();
  x.col(2) = f.phi.array().sin();
  const Eigen::VectorXd sw = f.w.array().sqrt();
  const Eigen::Vector3d coef = (sw.asDiagonal() * x).colPivHouseholderQr().solve(sw.cwiseProduct(f.y));
  return {coef(0), std::hypot(coef(1), coef(2)), std::atan2(coef(2), coef(1))};
}

// Levenberg-Marquardt in (A, B, phi0) from the heuristic start.
bool gauss_newton(const FitProblem& f, Eigen::Vector3d& p, int max_iterations, int& iterations) {
  double lambda = 1e-3;
  double chi = f.chi2(p);
  const auto w = f.w.asDiagonal();
  for (iterations = 0; iterations < max_iterations; ++iterations) {
    const Eigen::MatrixXd j = f.jacobian(p);
    const Eigen::Matrix3d jtj = j.transpose() * w * j;
    const Eigen::Vector3d g = j.transpose() * w * f.residuals(p);
    bool improved = false;
    for (int tries = 0; tries < 30 && !improved; ++tries) {
      Eigen::Matrix3d a = jtj;
      a.diagonal() *= 1.0 + lambda;
      a.diagonal().array() += 1e-300;
      const Eigen::Vector3d step = a.ldlt().solve(g);
      if (!step.allFinite()) return false;
      const Eigen::Vector3d trial = p + step;
      const double c = f.chi2(trial);
      if (c <= chi) {
        const double drop = chi - c;
        p = trial;
        chi = c;
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = true;
        if (drop <= 1e-15 * std::max(1.0, chi) && step.norm() <= 1e-12 * std::max(1.0, p.norm())) return true;
        if (step.norm() <= 1e-14 * std::max(1.0, p.norm())) return true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) return true;  // no descent direction left: at a minimum
  }
  return false;
}

}  // namespace

FringeFit fit_fringe(std::span<const double> phases, std::span<const double> counts, std::span<const double> sigmas,
                     const FitOptions& options) {
  const std::size_t n = phases.size();
  if (counts.size() != n || (options.weighted && sigmas.size() != n)) {
    throw std::invalid_argument("phases, counts and sigmas must have equal length");
  }
  if (n < 5) throw std::invalid_argument("fringe fit needs at least five samples");
  const auto [lo, hi] = std::minmax_element(phases.begin(), phases.end());
  if (!(*hi - *lo > std::numbers::pi)) throw std::invalid_argument("fringe samples must span more than pi");

  FitProblem f;
  f.phi = Eigen::Map<const Eigen::VectorXd>(phases.data(), static_cast<Eigen::Index>(n));
  f.y = Eigen::Map<const Eigen::VectorXd>(counts.data(), static_cast<Eigen::Index>(n));
  f.w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  if (options.weighted) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!(sigmas[i] > 0.0)) throw std::invalid_argument("weighted fit needs positive sigmas");
      f.w(static_cast<Eigen::Index>(i)) = 1.0 / (sigmas[i] * sigmas[i]);
    }
  }

  const auto ymax = std::max_element(counts.begin(), counts.end());
  const auto ymin = std::min_element(counts.begin(), counts.end());
  Eigen::Vector3d p(f.y.mean(), 0.5 * (*ymax - *ymin), phases[static_cast<std::size_t>(ymax - counts.begin())]);

  FringeFit out;
  const Eigen::Vector3d exact = linear_solution(f);
  out.nonlinear_converged = gauss_newton(f, p, options.max_iterations, out.iterations);
  // The reparameterized problem is linear, so its solution is the global
  // minimum; fall back to it if the iteration stopped elsewhere.
  if (!out.nonlinear_converged || !p.allFinite() || f.chi2(p) > f.chi2(exact) * (1.0 + 1e-9) + 1e-12) {
    out.nonlinear_converged = out.nonlinear_converged && p.allFinite() && f.chi2(p) <= f.chi2(exact) * (1.0 + 1e-6);
    p = exact;
  }
  if (!p.allFinite()) {
    const Eigen::VectorXd r = f.residuals(Eigen::Vector3d::Zero());
    throw FitError("fringe fit produced no finite solution", {r.data(), r.data() + r.size()});
  }
  if (p(1) < 0.0) {
    p(1) = -p(1);
    p(2) += std::numbers::pi;
  }
  p(2) = wrap_phase(p(2));

  out.offset = p(0);
  out.amplitude = p(1);
  out.phase0 = p(2);
  out.chi2 = f.chi2(p);
  out.dof = static_cast<int>(n) - 3;

  // Covariance via the linear coefficients (A, c, s), whose normal matrix is
  // regular whenever the phases span more than pi, then mapped to (A, B, phi0).
  Eigen::MatrixXd x(f.phi.size(), 3);
  x.col(0).setOnes();
  x.col(1) = f.phi.array().cos();
  x.col(2) = f.phi.array().sin();
  Eigen::Matrix3d cov_lin = (x.transpose() * f.w.asDiagonal() * x).inverse();
  if (options.scale_by_reduced_chi2 && out.dof > 0) cov_lin *= out.chi2 / out.dof;
  const double b = p(1);
  const double c = b * std::cos(p(2));
  const double s = b * std::sin(p(2));
  Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();
  jac(0, 0) = 1.0;
  if (b > 0.0) {
    jac(1, 1) = c / b;
    jac(1, 2) = s / b;
    jac(2, 1) = -s / (b * b);
    jac(2, 2) = c / (b * b);
    out.covariance = jac * cov_lin * jac.transpose();
  } else {
    out.covariance = Eigen::Matrix3d::Zero();
    out.covariance(0, 0) = cov_lin(0, 0);
    out.covariance(1, 1) = 0.5 * (cov_lin(1, 1) + cov_lin(2, 2));
    out.covariance(2, 2) = std::numeric_limits<double>::infinity();
  }
  out.visibility = corrected_visibility(out, 0.0);
  return out;
}

Estimate corrected_visibility(const FringeFit& fit, double noise_floor) {
  const double a = fit.offset - noise_floor;
  if (!(a > 0.0)) throw std::invalid_argument("noise floor must be below the fitted offset");
  const double b = fit.amplitude;
  const double var_a = fit.covariance(0, 0);
  const double var_b = fit.covariance(1, 1);
  const double cov_ab = fit.covariance(0, 1);
  const double var = var_b / (a * a) + b * b * var_a / (a * a * a * a) - 2.0 * b * cov_ab / (a * a * a);
  return {b / a, std::sqrt(std::max(0.0, var))};
}

Estimate mean_fidelity(std::span<const Estimate> table) {
  if (table.size() != 12) {
    throw std::invalid_argument("mean fidelity needs 12 entries (6 states x 2 settings), got " +
                                std::to_string(table.size()));
  }
  std::vector<double> v;
  for (const auto& e : table) v.push_back(e.value);
  return sample_mean(v);
}

}  // namespace qrouter
