#ifndef VIDIAG_GPD_HPP
#define VIDIAG_GPD_HPP

#include <cstddef>
#include <span>

#include "vidiag/random.hpp"

namespace vidiag {

/// Generalized Pareto distribution with location mu, scale sigma > 0 and
/// shape k. For k >= 0 the support is [mu, inf); for k < 0 it is
/// [mu, mu - sigma / k].
struct GpdParams {
  double mu = 0.0;
  double sigma = 1.0;
  double k = 0.0;
};

/// Shapes with |k| below this use the exponential limit with a first-order
/// correction in k.
inline constexpr double kGpdShapeEpsilon = 1e-8;

/// Log-density. Returns -inf outside the support; throws InvalidParameter
/// when sigma <= 0.
double gpd_log_pdf(double y, const GpdParams& params);

double gpd_cdf(double y, const GpdParams& params);

/// Inverse CDF for u in (0, 1); throws DomainError otherwise.
double gpd_quantile(double u, const GpdParams& params);

double gpd_sample(Rng& rng, const GpdParams& params);

/// Upper end of the support (+inf for k >= 0).
double gpd_upper_support(const GpdParams& params);

/// Result of fitting a GPD to the exceedances over a fixed threshold.
struct ParetoFit {
  double k_raw = 0.0;         ///< shape from the profile-likelihood fit
  double k_reg = 0.0;         ///< k_raw shrunk toward 0.5 (see regularize_khat)
  double sigma = 0.0;         ///< fitted scale
  double threshold = 0.0;     ///< location, fixed at the threshold
  std::size_t tail_count = 0; ///< exceedances used by the fit
  std::size_t dropped_ties = 0;
};

/// Minimum number of strictly positive exceedances for a fit.
inline constexpr std::size_t kMinTailCount = 5;

/// (m * k + 5) / (m + 10): weakly informative shrinkage toward 0.5.
double regularize_khat(double k, std::size_t m);

/// Fits (k, sigma) to tail_samples - threshold by the Zhang & Stephens
/// (2009) empirical-Bayes quasi-posterior mean over a grid of the
/// transformed shape theta = -k / sigma.
///
/// Exceedances equal to zero are dropped and counted in dropped_ties.
/// Throws InsufficientTail when fewer than kMinTailCount positive
/// exceedances remain, DegenerateTail when they are all equal, and
/// DomainError when any sample lies below the threshold.
///
/// The estimate is scale equivariant: scaling all exceedances by c > 0
/// scales sigma by c and leaves k unchanged.
ParetoFit fit_gpd_tail(std::span<const double> tail_samples, double threshold);

/// Same fit, given the exceedances directly (location 0).
ParetoFit fit_gpd_exceedances(std::span<const double> exceedances);

}  // namespace vidiag

#endif
