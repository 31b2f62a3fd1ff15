#include "databand/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "databand/errors.hpp"

namespace databand {
namespace {

constexpr std::size_t kCols = kLeverCount + 1;  // intercept + five levers

using Matrix6 = std::array<std::array<double, kCols>, kCols>;

// Cyclic Jacobi eigen decomposition of a symmetric 6x6 matrix. Returns
// eigenvalues; eigenvectors land in the columns of `vectors`.
std::array<double, kCols> jacobi_eigen(Matrix6 a, Matrix6& vectors) {
  for (std::size_t i = 0; i < kCols; ++i) {
    for (std::size_t j = 0; j < kCols; ++j) vectors[i][j] = (i == j) ? 1.0 : 0.0;
  }
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < kCols; ++p) {
      for (std::size_t q = p + 1; q < kCols; ++q) off += a[p][q] * a[p][q];
    }
    if (off < 1e-28) break;
    for (std::size_t p = 0; p < kCols; ++p) {
      for (std::size_t q = p + 1; q < kCols; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < kCols; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < kCols; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < kCols; ++k) {
          const double vkp = vectors[k][p], vkq = vectors[k][q];
          vectors[k][p] = c * vkp - s * vkq;
          vectors[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::array<double, kCols> eigenvalues{};
  for (std::size_t i = 0; i < kCols; ++i) eigenvalues[i] = a[i][i];
  return eigenvalues;
}

// Cholesky factorization; returns false if the matrix is not positive
// definite (rank-deficient design).
bool cholesky(const Matrix6& a, Matrix6& lower) {
  for (auto& row : lower) row.fill(0.0);
  for (std::size_t i = 0; i < kCols; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i][j];
      for (std::size_t k = 0; k < j; ++k) sum -= lower[i][k] * lower[j][k];
      if (i == j) {
        if (!(sum > 0.0)) return false;
        lower[i][j] = std::sqrt(sum);
      } else {
        lower[i][j] = sum / lower[j][j];
      }
    }
  }
  return true;
}

std::array<double, kCols> cholesky_solve(const Matrix6& lower,
                                         std::array<double, kCols> b) {
  // forward then backward substitution
  for (std::size_t i = 0; i < kCols; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= lower[i][k] * b[k];
    b[i] /= lower[i][i];
  }
  for (std::size_t ii = kCols; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < kCols; ++k) b[ii] -= lower[k][ii] * b[k];
    b[ii] /= lower[ii][ii];
  }
  return b;
}

std::string collinear_lever_report(const Matrix6& vectors,
                                   const std::array<double, kCols>& eigenvalues) {
  // levers loading heavily on the near-null direction
  std::size_t weakest = 0;
  for (std::size_t i = 1; i < kCols; ++i) {
    if (std::abs(eigenvalues[i]) < std::abs(eigenvalues[weakest])) weakest = i;
  }
  std::ostringstream out;
  bool first = true;
  for (std::size_t j = 1; j < kCols; ++j) {
    if (std::abs(vectors[j][weakest]) > 0.3) {
      if (!first) out << ", ";
      out << "x_" << MultiplierVector::kLeverNames[j - 1];
      first = false;
    }
  }
  if (first) out << "intercept";
  return out.str();
}

}  // namespace

void ObservedDeal::validate() const {
  if (!(std::isfinite(price_usd_per_mb) && price_usd_per_mb > 0.0)) {
    throw ValidationError("observed deal" +
                          (label.empty() ? std::string() : " '" + label + "'") +
                          ": price_usd_per_mb must be > 0");
  }
}

FitResult fit_ols(std::span<const ObservedDeal> deals, double condition_limit) {
  const std::size_t n = deals.size();
  if (n < kMinDealsForFit) {
    throw ValidationError("fit_ols: need at least " +
                          std::to_string(kMinDealsForFit) + " deals, got " +
                          std::to_string(n));
  }
  for (const auto& d : deals) d.validate();

  // Normal equations on columns (1, ln x_1 .. ln x_5).
  Matrix6 xtx{};
  std::array<double, kCols> xty{};
  for (const auto& deal : deals) {
    std::array<double, kCols> row;
    row[0] = 1.0;
    for (std::size_t j = 0; j < kLeverCount; ++j) {
      row[j + 1] = deal.multipliers.logs()[j];
    }
    const double y = std::log(deal.price_usd_per_mb);
    for (std::size_t i = 0; i < kCols; ++i) {
      for (std::size_t j = 0; j < kCols; ++j) xtx[i][j] += row[i] * row[j];
      xty[i] += row[i] * y;
    }
  }

  Matrix6 vectors{};
  const auto eigenvalues = jacobi_eigen(xtx, vectors);
  double lambda_max = 0.0, lambda_min = std::numeric_limits<double>::infinity();
  for (double ev : eigenvalues) {
    lambda_max = std::max(lambda_max, ev);
    lambda_min = std::min(lambda_min, ev);
  }
  const double condition =
      lambda_min > 0.0 ? std::sqrt(lambda_max / lambda_min)
                       : std::numeric_limits<double>::infinity();
  if (!(condition < condition_limit)) {
    throw ValidationError(
        "fit_ols: design matrix is (near-)rank-deficient (condition " +
        std::to_string(condition) + "); collinear lever(s): " +
        collinear_lever_report(vectors, eigenvalues));
  }

  Matrix6 lower{};
  if (!cholesky(xtx, lower)) {
    throw ValidationError(
        "fit_ols: design matrix is rank-deficient; collinear lever(s): " +
        collinear_lever_report(vectors, eigenvalues));
  }
  const auto coef = cholesky_solve(lower, xty);

  double rss = 0.0;
  for (const auto& deal : deals) {
    double fitted = coef[0];
    for (std::size_t j = 0; j < kLeverCount; ++j) {
      fitted += coef[j + 1] * deal.multipliers.logs()[j];
    }
    const double r = std::log(deal.price_usd_per_mb) - fitted;
    rss += r * r;
  }
  const double dof = static_cast<double>(n - kCols);
  const double sigma2 = std::max(rss / dof, 0.0);

  // diag((X'X)^-1) via one solve per unit vector
  std::array<double, kCols> inv_diag{};
  for (std::size_t i = 0; i < kCols; ++i) {
    std::array<double, kCols> e{};
    e[i] = 1.0;
    inv_diag[i] = cholesky_solve(lower, e)[i];
  }

  FitResult fit;
  fit.alpha_hat = coef[0];
  fit.alpha_se = std::sqrt(sigma2 * inv_diag[0]);
  for (std::size_t j = 0; j < kLeverCount; ++j) {
    fit.beta_hat[j] = coef[j + 1];
    fit.beta_se[j] = std::sqrt(sigma2 * inv_diag[j + 1]);
  }
  fit.sigma_hat = std::sqrt(sigma2);
  fit.n = n;
  fit.condition = condition;
  return fit;
}

PriorSpec refresh_prior(const PriorSpec& old_spec, const FitResult& fit,
                        double blend_weight) {
  if (!(blend_weight >= 0.0 && blend_weight <= 1.0)) {
    throw ValidationError("refresh_prior: blend weight must lie in [0,1]");
  }
  if (blend_weight == 0.0) return old_spec;
  const double w = blend_weight;
  PriorSpec out = old_spec;
  out.b0 = std::exp((1.0 - w) * std::log(old_spec.b0) + w * fit.alpha_hat);
  out.s_alpha = (1.0 - w) * old_spec.s_alpha + w * fit.alpha_se;
  for (std::size_t j = 0; j < kLeverCount; ++j) {
    out.mu[j] = (1.0 - w) * old_spec.mu[j] + w * fit.beta_hat[j];
    out.s[j] = (1.0 - w) * old_spec.s[j] + w * fit.beta_se[j];
  }
  // Keep the half-normal mean on the blended residual scale.
  const double half_normal_mean_factor = std::sqrt(2.0 / std::numbers::pi);
  const double old_mean = old_spec.s_sigma * half_normal_mean_factor;
  const double blended_mean = (1.0 - w) * old_mean + w * fit.sigma_hat;
  out.s_sigma = blended_mean / half_normal_mean_factor;
  out.validate();
  return out;
}

double default_blend_weight(std::size_t n) {
  return static_cast<double>(n) / (static_cast<double>(n) + 20.0);
}

}  // namespace databand
