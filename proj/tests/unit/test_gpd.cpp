#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "vidiag/error.hpp"
#include "vidiag/gpd.hpp"
#include "vidiag/random.hpp"

using namespace vidiag;

namespace {

// Exceedances drawn by inverting the oracle cdf at uniforms.
std::vector<double> gpd_draws(double k, double sigma, std::size_t m, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  std::vector<double> out(m);
  for (auto& x : out) {
    const double u = uniform_open(rng);
    x = k == 0.0 ? -sigma * std::log1p(-u) : sigma / k * (std::pow(1.0 - u, -k) - 1.0);
  }
  return out;
}

double median_khat(double k, std::size_t m, int seeds) {
  std::vector<double> ks;
  for (int s = 0; s < seeds; ++s) ks.push_back(fit_gpd_exceedances(gpd_draws(k, 1.0, m, 1000 + s)).k_raw);
  return oracle::median(ks);
}

}  // namespace

TEST_CASE("gpd_log_pdf: reference values") {
  CHECK(gpd_log_pdf(0.0, {0.0, 1.0, 0.0}) == doctest::Approx(0.0));
  CHECK(gpd_log_pdf(1.0, {0.0, 1.0, 1.0}) == doctest::Approx(std::log(0.25)));

  // Density at y = 2 (sigma 2, k 0.5) against a finite difference of the cdf.
  const auto cdf = [](double y) { return oracle::gpd_cdf(y, 0.0, 2.0, 0.5); };
  const double fd = oracle::central_difference(cdf, 2.0, 1e-5);
  CHECK(std::abs(gpd_log_pdf(2.0, {0.0, 2.0, 0.5}) - std::log(fd)) < 1e-6);
}

TEST_CASE("gpd_log_pdf: outside the support and bad scale") {
  CHECK(gpd_log_pdf(-0.1, {0.0, 1.0, 0.3}) == -INFINITY);
  // Bounded support for k < 0 ends at mu - sigma / k = 2.5.
  CHECK(gpd_log_pdf(2.6, {0.0, 1.0, -0.4}) == -INFINITY);
  CHECK(std::isfinite(gpd_log_pdf(2.4, {0.0, 1.0, -0.4})));
  CHECK_THROWS_AS(gpd_log_pdf(1.0, {0.0, 0.0, 0.3}), InvalidParameter);
  CHECK_THROWS_AS(gpd_log_pdf(1.0, {0.0, -1.0, 0.3}), InvalidParameter);
}

TEST_CASE("gpd: continuous across the small-shape branch") {
  for (double y : {0.1, 1.0, 5.0}) {
    const double at0 = gpd_log_pdf(y, {0.0, 1.0, 0.0});
    const double inside = gpd_log_pdf(y, {0.0, 1.0, (1.0 - 1e-6) * kGpdShapeEpsilon});
    const double outside = gpd_log_pdf(y, {0.0, 1.0, (1.0 + 1e-6) * kGpdShapeEpsilon});
    CHECK(std::abs(inside - at0) < 1e-6);
    CHECK(std::abs(outside - inside) < 1e-12);
    const double cdf_in = gpd_cdf(y, {0.0, 1.0, (1.0 - 1e-6) * kGpdShapeEpsilon});
    const double cdf_out = gpd_cdf(y, {0.0, 1.0, (1.0 + 1e-6) * kGpdShapeEpsilon});
    CHECK(std::abs(cdf_out - cdf_in) < 1e-12);
  }
}

TEST_CASE("gpd_quantile: reference values") {
  CHECK(gpd_quantile(0.5, {0.0, 1.0, 0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(gpd_quantile(1e-15, {3.0, 2.0, 0.7}) == doctest::Approx(3.0).epsilon(1e-12));

  const auto cdf = [](double y) { return oracle::gpd_cdf(y, 0.0, 1.0, 0.5); };
  const double by_bisection = oracle::bisect(cdf, 0.9, 0.0, 100.0);
  const double q = gpd_quantile(0.9, {0.0, 1.0, 0.5});
  CHECK(q == doctest::Approx(4.324555320336759).epsilon(1e-12));
  CHECK(q == doctest::Approx(by_bisection).epsilon(1e-10));

  CHECK_THROWS_AS(gpd_quantile(0.0, {}), DomainError);
  CHECK_THROWS_AS(gpd_quantile(1.0, {}), DomainError);
  CHECK_THROWS_AS(gpd_quantile(-0.2, {}), DomainError);
}

TEST_CASE("gpd_quantile inverts gpd_cdf") {
  for (double k : {-0.4, 0.0, 0.3, 0.7, 1.2}) {
    const GpdParams p{0.5, 1.7, k};
    double previous = -INFINITY;
    for (int i = 1; i <= 99; ++i) {
      const double u = i / 100.0;
      const double y = gpd_quantile(u, p);
      CHECK(y > previous);
      previous = y;
      CHECK(std::abs(gpd_cdf(y, p) - u) <= 1e-12 * u);
      CHECK(gpd_cdf(y, p) == doctest::Approx(oracle::gpd_cdf(y, p.mu, p.sigma, p.k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("gpd density integrates to one") {
  for (double k : {-0.4, 0.0, 0.3, 0.7, 1.2}) {
    const GpdParams p{0.0, 1.0, k};
    const auto pdf = [&](double y) { return std::exp(gpd_log_pdf(y, p)); };
    double total = 0.0;
    if (k < 0.0) {
      total = oracle::simpson(pdf, 0.0, gpd_upper_support(p));
    } else {
      // Integrate up to a far quantile and add the analytic remainder.
      const double upper = gpd_quantile(1.0 - 1e-9, p);
      const double cut = std::min(upper, 1e4);
      total = oracle::simpson(pdf, 0.0, std::min(cut, 50.0), 200000);
      if (cut > 50.0) {
        // Substitute y = exp(t) on the long tail.
        const auto tail = [&](double t) { return pdf(std::exp(t)) * std::exp(t); };
        total += oracle::simpson(tail, std::log(50.0), std::log(cut), 200000);
      }
      total += 1.0 - oracle::gpd_cdf(cut, 0.0, 1.0, k);
    }
    CHECK(std::abs(total - 1.0) < 1e-6);
  }
}

TEST_CASE("gpd_sample follows the distribution") {
  Rng rng = make_rng(3, 0);
  const GpdParams p{1.0, 2.0, 0.2};
  const int n = 200000;
  int below = 0;
  const double median = gpd_quantile(0.5, p);
  for (int i = 0; i < n; ++i) below += gpd_sample(rng, p) < median;
  CHECK(std::abs(below / static_cast<double>(n) - 0.5) < 0.005);
}

TEST_CASE("fit_gpd_tail recovers the shape") {
  CHECK(std::abs(median_khat(0.3, 1000, 50) - 0.3) < 0.05);
  CHECK(std::abs(median_khat(0.0, 1000, 50) - 0.0) < 0.05);
  CHECK(std::abs(median_khat(0.7, 1000, 50) - 0.7) < 0.05);
}

TEST_CASE("fit_gpd_tail is scale equivariant") {
  const std::vector<double> x = gpd_draws(0.4, 1.0, 400, 9);
  for (double c : {1e-6, 0.37, 1.0, 250.0, 1e8}) {
    std::vector<double> scaled(x);
    for (auto& v : scaled) v *= c;
    const ParetoFit a = fit_gpd_exceedances(x);
    const ParetoFit b = fit_gpd_exceedances(scaled);
    CHECK(b.k_raw == doctest::Approx(a.k_raw).epsilon(1e-12));
    CHECK(b.sigma == doctest::Approx(c * a.sigma).epsilon(1e-12));
  }
}

TEST_CASE("fit_gpd_tail: threshold handling and errors") {
  std::vector<double> tail = gpd_draws(0.2, 1.0, 50, 4);
  for (auto& v : tail) v += 10.0;
  const ParetoFit shifted = fit_gpd_tail(tail, 10.0);
  const ParetoFit direct = fit_gpd_exceedances(gpd_draws(0.2, 1.0, 50, 4));
  CHECK(shifted.k_raw == doctest::Approx(direct.k_raw).epsilon(1e-9));
  CHECK(shifted.threshold == 10.0);
  CHECK(shifted.tail_count == 50);

  std::vector<double> with_ties = tail;
  with_ties.push_back(10.0);
  with_ties.push_back(10.0);
  const ParetoFit tied = fit_gpd_tail(with_ties, 10.0);
  CHECK(tied.dropped_ties == 2);
  CHECK(tied.tail_count == 50);

  CHECK_THROWS_AS(fit_gpd_exceedances(std::vector<double>{1.0, 2.0, 3.0, 4.0}), InsufficientTail);
  CHECK_THROWS_AS(fit_gpd_exceedances(std::vector<double>(10, 2.5)), DegenerateTail);
  CHECK_THROWS_AS(fit_gpd_tail(std::vector<double>{1, 2, 3, 4, 5, 6}, 3.5), DomainError);
}

TEST_CASE("regularize_khat shrinks toward one half") {
  CHECK(regularize_khat(0.5, 100) == doctest::Approx(0.5));
  CHECK(regularize_khat(1.0, 10) == doctest::Approx(15.0 / 20.0));
  CHECK(regularize_khat(0.0, 1000) == doctest::Approx(5.0 / 1010.0));
  const ParetoFit f = fit_gpd_exceedances(gpd_draws(0.3, 1.0, 200, 1));
  CHECK(f.k_reg == doctest::Approx((200 * f.k_raw + 5.0) / 210.0));
}

TEST_CASE("moments below order 1/k stabilize and above diverge") {
  // k = 0.4: moments of order below 2.5 are finite, the third is not.
  const GpdParams p{0.0, 1.0, 0.4};
  const auto moment = [&](int order, std::size_t n, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::pow(gpd_sample(rng, p), order);
    return s / static_cast<double>(n);
  };
  // Mean is sigma / (1 - k).
  const double exact_mean = 1.0 / 0.6;
  std::vector<double> third_ratio;
  for (int s = 0; s < 7; ++s) {
    CHECK(std::abs(moment(1, 400000, 50 + s) - exact_mean) < 0.03 * exact_mean);
    third_ratio.push_back(moment(3, 400000, 60 + s) / moment(3, 4000, 70 + s));
  }
  // The third empirical moment keeps growing with the sample size.
  CHECK(oracle::median(third_ratio) > 2.0);
}
