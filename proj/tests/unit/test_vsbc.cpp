#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "vidiag/error.hpp"
#include "vidiag/ks.hpp"
#include "vidiag/models.hpp"
#include "vidiag/vsbc.hpp"

using namespace vidiag;

namespace {

std::span<const double> as_span(const std::vector<double>& v) { return {v.data(), v.size()}; }

// Normal target whose replications break the log joint when the first
// drawn coordinate exceeds a cut, so that VI fails on those replications.
class Fragile final : public Model {
 public:
  Fragile(double cut, bool broken) : inner_(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)), cut_(cut), broken_(broken) {}
  std::string name() const override { return "fragile"; }
  Eigen::Index dim() const override { return 1; }
  std::vector<std::string> param_names() const override { return {"x"}; }
  std::vector<std::string> quantity_names() const override { return {"x"}; }
  double log_joint(const Eigen::VectorXd& z) const override {
    return broken_ ? std::numeric_limits<double>::quiet_NaN() : inner_.log_joint(z);
  }
  double log_joint_grad(const Eigen::VectorXd& z, Eigen::VectorXd& g) const override {
    const double v = inner_.log_joint_grad(z, g);
    return broken_ ? std::numeric_limits<double>::quiet_NaN() : v;
  }
  Eigen::VectorXd to_constrained(const Eigen::VectorXd& z) const override { return z; }
  Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& t) const override { return t; }
  double log_abs_det_jacobian(const Eigen::VectorXd&) const override { return 0.0; }
  std::optional<Eigen::Index> quantity_coordinate(Eigen::Index i) const override { return i; }
  Eigen::VectorXd sample_prior(Rng& rng) const override { return inner_.sample_prior(rng); }
  std::unique_ptr<Model> simulate(const Eigen::VectorXd& theta, Rng&) const override {
    return std::make_unique<Fragile>(cut_, theta[0] > cut_);
  }
  void write_data_csv(std::ostream&) const override {}

 private:
  AnalyticGaussian inner_;
  double cut_;
  bool broken_;
};

}  // namespace

TEST_CASE("ks_two_sample: hand-enumerated statistics") {
  const std::vector<double> a{0.1, 0.2}, b{0.8, 0.9};
  CHECK(ks_two_sample(as_span(a), as_span(b)).statistic == 1.0);
  CHECK(ks_two_sample(as_span(a), as_span(b), Alternative::Greater).statistic == 1.0);
  CHECK(ks_two_sample(as_span(a), as_span(b), Alternative::Less).statistic == 0.0);

  const std::vector<double> x{1.0, 2.0, 3.0}, y{2.0, 4.0};
  // At 1: 1/3 - 0; at 2: 2/3 - 1/2; at 3: 1 - 1/2; at 4: 0.
  const oracle::Gaps g = oracle::ecdf_gaps(x, y);
  CHECK(g.plus == doctest::Approx(0.5));
  CHECK(ks_two_sample(as_span(x), as_span(y), Alternative::Greater).statistic == doctest::Approx(0.5));
  CHECK(ks_two_sample(as_span(x), as_span(y), Alternative::Less).statistic == doctest::Approx(g.minus));
  CHECK(ks_two_sample(as_span(x), as_span(y)).statistic == doctest::Approx(0.5));

  // Ties across samples are compared at the pooled value.
  const std::vector<double> t1{0.5, 0.5, 0.7, 0.9}, t2{0.5, 0.6, 0.7, 0.7};
  const oracle::Gaps gt = oracle::ecdf_gaps(t1, t2);
  CHECK(ks_two_sample(as_span(t1), as_span(t2)).statistic == doctest::Approx(std::max(gt.plus, gt.minus)));

  CHECK(ks_two_sample(as_span(x), as_span(x)).statistic == 0.0);
  CHECK(ks_two_sample(as_span(x), as_span(x)).p_value == 1.0);
  CHECK_THROWS_AS(ks_two_sample({}, as_span(x)), DomainError);
}

TEST_CASE("ks_two_sample: random statistics match brute force") {
  Rng rng = make_rng(200, 0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> x(7 + trial % 5), y(4 + trial % 7);
    for (auto& v : x) v = std::round(10.0 * uniform_open(rng)) / 10.0;
    for (auto& v : y) v = std::round(10.0 * uniform_open(rng)) / 10.0;
    const oracle::Gaps g = oracle::ecdf_gaps(x, y);
    CHECK(ks_two_sample(as_span(x), as_span(y), Alternative::Greater).statistic == doctest::Approx(g.plus));
    CHECK(ks_two_sample(as_span(x), as_span(y), Alternative::Less).statistic == doctest::Approx(g.minus));
  }
}

TEST_CASE("kolmogorov_survival") {
  CHECK(kolmogorov_survival(0.0) == 1.0);
  // Classical critical values.
  CHECK(kolmogorov_survival(1.3580986) == doctest::Approx(0.05).epsilon(1e-5));
  CHECK(kolmogorov_survival(1.6276236) == doctest::Approx(0.01).epsilon(1e-5));
  // Both series agree where they switch.
  CHECK(kolmogorov_survival(1.1799999) == doctest::Approx(kolmogorov_survival(1.1800001)).epsilon(1e-6));
  double previous = 1.0;
  for (double l = 0.05; l < 4.0; l += 0.05) {
    const double p = kolmogorov_survival(l);
    CHECK(p <= previous);
    previous = p;
  }
}

TEST_CASE("ks_two_sample: null rejection rate") {
  Rng rng = make_rng(201, 0);
  int rejected = 0;
  std::vector<double> x(500), y(500);
  for (int trial = 0; trial < 1000; ++trial) {
    for (auto& v : x) v = uniform_open(rng);
    for (auto& v : y) v = uniform_open(rng);
    rejected += ks_two_sample(as_span(x), as_span(y)).p_value < 0.05;
  }
  const double rate = rejected / 1000.0;
  CHECK(rate >= 0.03);
  CHECK(rate <= 0.07);
}

TEST_CASE("histogram_bins") {
  std::vector<double> grid(100);
  for (int i = 0; i < 100; ++i) grid[static_cast<std::size_t>(i)] = (i + 0.5) / 100.0;
  const Histogram h = histogram_bins(as_span(grid), 10);
  CHECK(h.edges.size() == 11);
  CHECK(h.edges.front() == 0.0);
  CHECK(h.edges.back() == 1.0);
  for (std::size_t c : h.counts) CHECK(c == 10);

  const std::vector<double> high(50, 0.999);
  CHECK(histogram_bins(as_span(high), 10).counts.back() == 50);
  const std::vector<double> ends{0.0, 1.0, 1.0};
  const Histogram e = histogram_bins(as_span(ends), 4);
  CHECK(e.counts.front() == 1);
  CHECK(e.counts.back() == 2);

  // Beta(1/2, 1/2) by sin^2 of a uniform angle: U shaped.
  Rng rng = make_rng(202, 0);
  std::vector<double> u(10000);
  for (auto& v : u) v = std::pow(std::sin(0.5 * std::numbers::pi * uniform_open(rng)), 2.0);
  const Histogram b = histogram_bins(as_span(u), 10);
  for (std::size_t mid = 2; mid < 8; ++mid) {
    CHECK(b.counts.front() > b.counts[mid]);
    CHECK(b.counts.back() > b.counts[mid]);
  }

  const std::vector<double> bad{0.5, 1.2};
  CHECK_THROWS_AS(histogram_bins(as_span(bad), 10), DomainError);
  CHECK_THROWS_AS(histogram_bins(as_span(grid), 0), InvalidParameter);
}

TEST_CASE("calibration_prob") {
  CHECK(calibration_prob_normal(0.3, 2.0, 0.3) == 0.5);
  CHECK(calibration_prob_normal(0.0, 1.0, -INFINITY) == 1.0);
  CHECK(calibration_prob_normal(0.0, 1.0, INFINITY) == 0.0);
  CHECK(calibration_prob_normal(0.0, 1.0, 1.0) == doctest::Approx(1.0 - oracle::normal_cdf(1.0)).epsilon(1e-14));
  CHECK(calibration_prob_normal(0.0, 1.0, 1.0) == doctest::Approx(0.1587).epsilon(1e-3));

  // Positive quantity: the event is the same on either scale.
  const auto schools = eight_schools(Parametrization::Centered);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(10), omega = Eigen::VectorXd::Zero(10);
  mu[9] = 1.0;
  omega[9] = std::log(0.5);
  const MeanFieldGaussian q(mu, omega);
  Eigen::VectorXd theta0 = Eigen::VectorXd::Zero(10);
  theta0[9] = std::exp(1.0);
  CHECK(calibration_prob(q, *schools, theta0, 9) == doctest::Approx(0.5));

  // Non-centered theta_j is not a single coordinate: Monte Carlo fallback.
  const auto nc = eight_schools(Parametrization::NonCentered);
  const MeanFieldGaussian standard = MeanFieldGaussian::standard(10);
  Eigen::VectorXd t0 = Eigen::VectorXd::Zero(10);
  t0[9] = 1.0;
  Rng rng = make_rng(203, 0);
  // theta_1 = mu + tau z with independent standard normal mu, z and
  // lognormal tau is symmetric about 0.
  CHECK(std::abs(calibration_prob(standard, *nc, t0, 0, &rng, 20000) - 0.5) < 0.02);
  CHECK_THROWS_AS(calibration_prob(standard, *nc, t0, 0), InvalidParameter);
}

TEST_CASE("symmetry_test") {
  Rng rng = make_rng(204, 0);
  std::vector<double> p(300), flipped(300);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::pow(uniform_open(rng), 0.6);  // pushed toward 1: right skew
    flipped[i] = 1.0 - p[i];
  }
  const MarginResult a = symmetry_test(as_span(p), 0.05);
  const MarginResult b = symmetry_test(as_span(flipped), 0.05);
  CHECK(a.two_sided.statistic == b.two_sided.statistic);
  CHECK(a.less.statistic == b.greater.statistic);
  CHECK(a.greater.statistic == b.less.statistic);
  CHECK(a.skew == Skew::RightSkewed);
  CHECK(b.skew == Skew::LeftSkewed);
  CHECK(a.less.p_value < 0.05);

  std::vector<double> sym(300);
  for (auto& v : sym) v = uniform_open(rng);
  const MarginResult s = symmetry_test(as_span(sym), 0.05);
  CHECK(s.skew == Skew::Symmetric);
  CHECK(s.two_sided.p_value >= 0.05);
}

TEST_CASE("vsbc_run: oracle mode is calibrated") {
  Rng rng = make_rng(205, 0);
  const auto model = ConjugateNormal::synthetic(2, 5, 1.0, 1.0, rng);
  VsbcConfig cfg;
  cfg.oracle = true;
  int flagged = 0;
  const int runs = 40;
  for (int run = 0; run < runs; ++run) {
    const VsbcReport r = vsbc_run(*model, cfg, static_cast<std::uint64_t>(run));
    CHECK(r.pvals.rows() == 100);
    CHECK(r.pvals.minCoeff() >= 0.0);
    CHECK(r.pvals.maxCoeff() <= 1.0);
    for (const auto& m : r.margins) flagged += m.skew != Skew::Symmetric;
  }
  // Two margins per run; p against 1 - p rejects a little above the nominal rate.
  CHECK(flagged / (2.0 * runs) <= 0.2);
}

TEST_CASE("vsbc_run: a shifted mean is flagged") {
  Rng rng = make_rng(206, 0);
  const auto model = ConjugateNormal::synthetic(2, 20, 1.0, 1.0, rng);
  VsbcConfig cfg;
  cfg.oracle = true;
  cfg.mu_shift = Eigen::Vector2d(0.5, 0.0);  // posterior sd is about 0.22
  const VsbcReport r = vsbc_run(*model, cfg, 7);
  CHECK(r.margins[0].skew == Skew::RightSkewed);
  CHECK(r.margins[1].skew == Skew::Symmetric);
  cfg.mu_shift = Eigen::Vector2d(-0.5, 0.0);
  CHECK(vsbc_run(*model, cfg, 7).margins[0].skew == Skew::LeftSkewed);
}

TEST_CASE("vsbc_run: margins, determinism and report fields") {
  Rng rng = make_rng(207, 0);
  const auto model = linear_regression(100, 3, Eigen::Vector3d(0.5, 0.0, -0.5), 1.0, rng);
  VsbcConfig cfg;
  cfg.replications = 20;
  cfg.margins = {"beta_1", "log_sigma"};
  const VsbcReport a = vsbc_run(*model, cfg, 3);
  const VsbcReport b = vsbc_run(*model, cfg, 3);
  CHECK((a.pvals.array() == b.pvals.array()).all());
  CHECK(a.margin_names == std::vector<std::string>{"beta_1", "log_sigma"});
  CHECK(a.margins[1].quantity == 3);
  CHECK(a.expected_false_flags == doctest::Approx(0.1));
  CHECK(a.replication_index.size() == 20);
  CHECK(a.margins[0].histogram.counts.size() == 10);
}

TEST_CASE("vsbc_run: failures are counted and abort past the limit") {
  VsbcConfig cfg;
  cfg.replications = 200;
  cfg.vi.max_iters = 200;
  // P(x > 1.5) is about 7 percent.
  const Fragile some(1.5, false);
  const VsbcReport r = vsbc_run(some, cfg, 1);
  CHECK(r.failures > 0);
  CHECK(r.failures < 40);
  CHECK(static_cast<std::size_t>(r.pvals.rows()) == 200 - r.failures);

  // P(x > 0.5) is about 31 percent.
  const Fragile many(0.5, false);
  try {
    (void)vsbc_run(many, cfg, 1);
    FAIL("expected abort");
  } catch (const VsbcAborted& e) {
    CHECK(e.replications() == 200);
    CHECK(e.failures() > 40);
  }
}
