#ifndef VIDIAG_KS_HPP
#define VIDIAG_KS_HPP

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace vidiag {

/// Alternatives follow the usual convention for two samples x and y:
/// Greater means the CDF of x lies above that of y (statistic max(F_x - F_y)),
/// Less means it lies below (statistic max(F_y - F_x)).
enum class Alternative { TwoSided, Less, Greater };

std::string_view to_string(Alternative a);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test. ECDFs are compared at the pooled
/// unique values, so ties are handled exactly. P-values are asymptotic
/// with effective size n_x n_y / (n_x + n_y): Kolmogorov distribution for
/// the two-sided test, exp(-2 n D^2) for the one-sided ones. Throws
/// DomainError on empty input.
KsResult ks_two_sample(std::span<const double> x, std::span<const double> y,
                       Alternative alternative = Alternative::TwoSided);

/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

struct Histogram {
  std::vector<double> edges;        ///< n_bins + 1 equal-width edges on [0, 1]
  std::vector<std::size_t> counts;  ///< last bin is closed on the right
};

/// Equal-width histogram of values in [0, 1]. Throws DomainError for
/// values outside [0, 1] and InvalidParameter for n_bins == 0.
Histogram histogram_bins(std::span<const double> values, std::size_t n_bins);

}  // namespace vidiag

#endif
