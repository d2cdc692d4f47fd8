#include "vidiag/ks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vidiag/error.hpp"

namespace vidiag {

std::string_view to_string(Alternative a) {
  switch (a) {
    case Alternative::TwoSided:
      return "two_sided";
    case Alternative::Less:
      return "less";
    case Alternative::Greater:
      return "greater";
  }
  return "two_sided";
}

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (lambda < 1.18) {
    // Jacobi theta form converges fast for small lambda.
    const double factor = std::sqrt(2.0 * pi) / lambda;
    const double w = pi * pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      cdf += std::exp(-odd * odd * w);
    }
    return std::clamp(1.0 - factor * cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> x, std::span<const double> y, Alternative alternative) {
  if (x.empty() || y.empty()) throw DomainError("Kolmogorov-Smirnov test needs two nonempty samples");
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double nx = static_cast<double>(xs.size());
  const double ny = static_cast<double>(ys.size());

  double d_plus = 0.0;   // max F_x - F_y
  double d_minus = 0.0;  // max F_y - F_x
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < xs.size() || j < ys.size()) {
    double t;
    if (j == ys.size() || (i < xs.size() && xs[i] <= ys[j])) {
      t = xs[i];
    } else {
      t = ys[j];
    }
    while (i < xs.size() && xs[i] <= t) ++i;
    while (j < ys.size() && ys[j] <= t) ++j;
    const double diff = static_cast<double>(i) / nx - static_cast<double>(j) / ny;
    d_plus = std::max(d_plus, diff);
    d_minus = std::max(d_minus, -diff);
  }

  const double n_eff = nx * ny / (nx + ny);
  KsResult r;
  switch (alternative) {
    case Alternative::TwoSided:
      r.statistic = std::max(d_plus, d_minus);
      r.p_value = kolmogorov_survival(std::sqrt(n_eff) * r.statistic);
      break;
    case Alternative::Greater:
      r.statistic = d_plus;
      r.p_value = std::exp(-2.0 * n_eff * d_plus * d_plus);
      break;
    case Alternative::Less:
      r.statistic = d_minus;
      r.p_value = std::exp(-2.0 * n_eff * d_minus * d_minus);
      break;
  }
  return r;
}

Histogram histogram_bins(std::span<const double> values, std::size_t n_bins) {
  if (n_bins == 0) throw InvalidParameter("histogram needs at least one bin");
  Histogram h;
  h.edges.resize(n_bins + 1);
  for (std::size_t b = 0; b <= n_bins; ++b) h.edges[b] = static_cast<double>(b) / static_cast<double>(n_bins);
  h.counts.assign(n_bins, 0);
  for (const double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("histogram values must lie in [0, 1]");
    auto b = static_cast<std::size_t>(std::floor(v * static_cast<double>(n_bins)));
    ++h.counts[std::min(b, n_bins - 1)];
  }
  return h;
}

}  // namespace vidiag
