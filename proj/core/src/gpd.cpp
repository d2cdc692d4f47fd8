#include "vidiag/gpd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "vidiag/error.hpp"

namespace vidiag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_scale(const GpdParams& p) {
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
    throw InvalidParameter("generalized Pareto scale must be positive and finite");
  }
  if (!std::isfinite(p.k) || !std::isfinite(p.mu)) {
    throw InvalidParameter("generalized Pareto location and shape must be finite");
  }
}

// Profile log-likelihood of the transformed shape theta for exceedances x
// (Zhang & Stephens 2009, eq. 3), up to the factor n.
double profile_log_lik(double theta, std::span<const double> x) {
  double sum = 0.0;
  for (const double xi : x) sum += std::log1p(-theta * xi);
  const double k = sum / static_cast<double>(x.size());
  return std::log(-theta / k) - k - 1.0;
}

}  // namespace

double gpd_upper_support(const GpdParams& p) {
  return p.k < 0.0 ? p.mu - p.sigma / p.k : kInf;
}

double gpd_log_pdf(double y, const GpdParams& p) {
  check_scale(p);
  if (std::isnan(y) || y < p.mu || y > gpd_upper_support(p)) return -kInf;
  const double z = (y - p.mu) / p.sigma;
  if (std::abs(p.k) < kGpdShapeEpsilon) {
    return -std::log(p.sigma) - z - p.k * z * (1.0 - 0.5 * z);
  }
  const double arg = std::log1p(p.k * z);
  return -std::log(p.sigma) - (1.0 / p.k + 1.0) * arg;
}

double gpd_cdf(double y, const GpdParams& p) {
  check_scale(p);
  if (y <= p.mu) return 0.0;
  if (y >= gpd_upper_support(p)) return 1.0;
  const double z = (y - p.mu) / p.sigma;
  if (std::abs(p.k) < kGpdShapeEpsilon) {
    return -std::expm1(-z * (1.0 - 0.5 * p.k * z));
  }
  return -std::expm1(-std::log1p(p.k * z) / p.k);
}

double gpd_quantile(double u, const GpdParams& p) {
  check_scale(p);
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("generalized Pareto quantile requires 0 < u < 1");
  }
  const double neg_log_tail = -std::log1p(-u);
  if (std::abs(p.k) < kGpdShapeEpsilon) {
    return p.mu + p.sigma * neg_log_tail * (1.0 + 0.5 * p.k * neg_log_tail);
  }
  return p.mu + p.sigma * std::expm1(p.k * neg_log_tail) / p.k;
}

double gpd_sample(Rng& rng, const GpdParams& params) {
  return gpd_quantile(uniform_open(rng), params);
}

double regularize_khat(double k, std::size_t m) {
  const double md = static_cast<double>(m);
  return (md * k + 5.0) / (md + 10.0);
}

ParetoFit fit_gpd_exceedances(std::span<const double> exceedances) {
  std::vector<double> x;
  x.reserve(exceedances.size());
  std::size_t ties = 0;
  for (const double e : exceedances) {
    if (std::isnan(e) || e < 0.0) {
      throw DomainError("tail samples must not lie below the threshold");
    }
    if (e == 0.0) {
      ++ties;
    } else {
      x.push_back(e);
    }
  }
  if (x.size() < kMinTailCount) {
    throw InsufficientTail("generalized Pareto fit needs at least 5 positive exceedances, got " +
                           std::to_string(x.size()));
  }
  std::sort(x.begin(), x.end());
  if (x.front() == x.back()) {
    throw DegenerateTail("all tail exceedances are equal");
  }

  const std::size_t n = x.size();
  const double nd = static_cast<double>(n);
  constexpr double kPrior = 3.0;
  constexpr std::size_t kMinGridPoints = 30;
  const std::size_t grid = kMinGridPoints + static_cast<std::size_t>(std::floor(std::sqrt(nd)));

  // First quartile anchors the grid; the largest value bounds theta from below.
  const std::size_t quartile_index = static_cast<std::size_t>(std::floor(nd / 4.0 + 0.5));
  const double x_star = x[std::max<std::size_t>(quartile_index, 1) - 1];
  const double x_max = x.back();

  std::vector<double> theta(grid);
  std::vector<double> log_lik(grid);
  double max_log_lik = -kInf;
  for (std::size_t j = 0; j < grid; ++j) {
    const double jj = static_cast<double>(j + 1);
    theta[j] = 1.0 / x_max +
               (1.0 - std::sqrt(static_cast<double>(grid) / (jj - 0.5))) / kPrior / x_star;
    log_lik[j] = nd * profile_log_lik(theta[j], x);
    if (std::isfinite(log_lik[j])) max_log_lik = std::max(max_log_lik, log_lik[j]);
  }

  double weight_sum = 0.0;
  double theta_hat = 0.0;
  for (std::size_t j = 0; j < grid; ++j) {
    if (!std::isfinite(log_lik[j])) continue;
    const double w = std::exp(log_lik[j] - max_log_lik);
    weight_sum += w;
    theta_hat += w * theta[j];
  }
  theta_hat /= weight_sum;

  double sum = 0.0;
  for (const double xi : x) sum += std::log1p(-theta_hat * xi);
  const double k = sum / nd;
  const double sigma = -k / theta_hat;

  ParetoFit fit;
  fit.k_raw = std::isfinite(k) ? k : kInf;
  fit.k_reg = regularize_khat(fit.k_raw, n);
  fit.sigma = sigma;
  fit.threshold = 0.0;
  fit.tail_count = n;
  fit.dropped_ties = ties;
  return fit;
}

ParetoFit fit_gpd_tail(std::span<const double> tail_samples, double threshold) {
  std::vector<double> exceedances;
  exceedances.reserve(tail_samples.size());
  for (const double s : tail_samples) exceedances.push_back(s - threshold);
  ParetoFit fit = fit_gpd_exceedances(exceedances);
  fit.threshold = threshold;
  return fit;
}

}  // namespace vidiag
