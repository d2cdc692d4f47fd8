#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "vidiag/error.hpp"
#include "vidiag/models.hpp"
#include "vidiag/psis.hpp"
#include "vidiag/random.hpp"
#include "vidiag/vi.hpp"

using namespace vidiag;

namespace {

// Draws from N(q_mean, q_sd) with log densities of a N(p_mean, p_sd) target.
DrawBatch gaussian_batch(double q_mean, double q_sd, double p_mean, double p_sd, std::size_t s, Rng& rng) {
  DrawBatch b;
  b.draws.resize(static_cast<Eigen::Index>(s), 1);
  b.log_target.resize(static_cast<Eigen::Index>(s));
  b.log_proposal.resize(static_cast<Eigen::Index>(s));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(s); ++i) {
    const double x = q_mean + q_sd * standard_normal(rng);
    b.draws(i, 0) = x;
    b.log_target[i] = oracle::normal_log_pdf(x, p_mean, p_sd);
    b.log_proposal[i] = oracle::normal_log_pdf(x, q_mean, q_sd);
  }
  return b;
}

SmoothedWeights smooth(const DrawBatch& b, const PsisOptions& o = {}) { return psis_smooth(log_ratios(b).values, o); }

}  // namespace

TEST_CASE("log_ratios") {
  SUBCASE("identical densities give zeros") {
    const std::vector<double> lp{-1.0, -2.5, 3.0};
    const LogRatios r = log_ratios(lp, lp);
    CHECK(r.values.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("standard normal against itself") {
    Rng rng = make_rng(1, 0);
    const DrawBatch b = gaussian_batch(0.0, 1.0, 0.0, 1.0, 50, rng);
    CHECK(log_ratios(b).values.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("shifted target") {
    // log N(x; 0.5, 1) - log N(x; 0, 1) = 0.5 x - 0.125, shifted by its max at x = 1.
    const std::vector<double> x{0.0, 0.5, 1.0};
    std::vector<double> lp, lq;
    for (double v : x) {
      lp.push_back(oracle::normal_log_pdf(v, 0.5, 1.0));
      lq.push_back(oracle::normal_log_pdf(v, 0.0, 1.0));
    }
    const LogRatios r = log_ratios(lp, lq);
    CHECK(r.shift == doctest::Approx(0.375));
    CHECK(r.values[0] == doctest::Approx(-0.5));
    CHECK(r.values[1] == doctest::Approx(-0.25));
    CHECK(r.values[2] == doctest::Approx(0.0));
  }
  SUBCASE("non-finite input is index-tagged") {
    DrawBatch b;
    b.log_target = Eigen::VectorXd::Zero(30);
    b.log_proposal = Eigen::VectorXd::Zero(30);
    b.log_proposal[17] = NAN;
    try {
      (void)log_ratios(b);
      FAIL("expected InputError");
    } catch (const InputError& e) {
      CHECK(e.index() == 17);
    }
  }
}

TEST_CASE("psis_tail_length") {
  CHECK(psis_tail_length(25) == 5);
  CHECK(psis_tail_length(100) == 20);
  CHECK(psis_tail_length(1000) == 95);
  CHECK(psis_tail_length(100000) == 949);
  for (std::size_t s = 25; s < 2000; s += 7) CHECK(psis_tail_length(s) >= 5);
}

TEST_CASE("psis_smooth: preconditions and constant ratios") {
  CHECK_THROWS_AS(psis_smooth(Eigen::VectorXd::Zero(24)), InvalidParameter);
  const SmoothedWeights w = psis_smooth(Eigen::VectorXd::Constant(100, -3.0));
  CHECK(w.constant_ratios);
  CHECK_FALSE(w.khat_available());
  CHECK(w.category == Category::Good);
  CHECK((w.weights.array() == w.weights[0]).all());
}

TEST_CASE("psis_smooth: degenerate tail is flagged Bad") {
  // Top 20 ratios tie: the tail has no spread to fit.
  Eigen::VectorXd lr = Eigen::VectorXd::LinSpaced(100, -5.0, -1.0);
  lr.tail(21).setConstant(0.0);
  const SmoothedWeights w = psis_smooth(lr);
  CHECK(w.fit_failed);
  CHECK(w.category == Category::Bad);
  CHECK((w.log_weights.array() == lr.array()).all());
}

TEST_CASE("psis_smooth: structure of the smoothed weights") {
  Rng rng = make_rng(2, 0);
  const DrawBatch b = gaussian_batch(0.0, 1.0, 0.0, 2.0, 4000, rng);
  const LogRatios r = log_ratios(b);
  const SmoothedWeights w = psis_smooth(r.values);
  REQUIRE(w.khat_available());
  const std::size_t m = w.tail_count;
  CHECK(m == psis_tail_length(4000));

  std::vector<Eigen::Index> order(4000);
  for (Eigen::Index i = 0; i < 4000; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto c) { return r.values[a] < r.values[c]; });

  // Truncation at the raw maximum.
  CHECK(w.weights.maxCoeff() <= 1.0);
  // Below the threshold the weights are the raw ratios.
  for (std::size_t i = 0; i + m < order.size(); ++i) CHECK(w.log_weights[order[i]] == r.values[order[i]]);
  // Above it, rank order is preserved.
  for (std::size_t i = order.size() - m + 1; i < order.size(); ++i) {
    CHECK(w.weights[order[i]] >= w.weights[order[i - 1]]);
  }
  CHECK(w.pareto_fit->threshold == doctest::Approx(std::exp(r.values[order[order.size() - m - 1]])));
}

TEST_CASE("psis_smooth: GPD tail recovery") {
  // Exponentiated log ratios whose top decile above the cut are GPD(0.3, 1).
  std::vector<double> ks;
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng = make_rng(seed, 11);
    Eigen::VectorXd lr(10000);
    for (Eigen::Index i = 0; i < lr.size(); ++i) {
      const double u = uniform_open(rng);
      lr[i] = std::log(1.0 + (std::pow(1.0 - u, -0.3) - 1.0) / 0.3);
    }
    ks.push_back(psis_smooth(lr).khat_raw);
  }
  CHECK(std::abs(oracle::median(ks) - 0.3) < 0.05);
}

TEST_CASE("psis_smooth: Gaussian scale mismatch") {
  // q = N(0, 1), p = N(0, sqrt 2): the ratio tail has shape 1 - 1/2.
  std::vector<double> ks, second;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng = make_rng(seed, 12);
    const DrawBatch b = gaussian_batch(0.0, 1.0, 0.0, std::sqrt(2.0), 100000, rng);
    const SmoothedWeights w = smooth(b);
    ks.push_back(w.khat());
    second.push_back(psis_moments(b, w).second[0]);
  }
  CHECK(std::abs(oracle::median(ks) - 0.5) < 0.1);
  CHECK(std::abs(oracle::median(second) - 2.0) < 0.1);
}

TEST_CASE("khat_category thresholds") {
  CHECK(khat_category(0.3) == Category::Good);
  CHECK(khat_category(0.4999) == Category::Good);
  CHECK(khat_category(0.5) == Category::Ok);
  CHECK(khat_category(0.64) == Category::Ok);
  CHECK(khat_category(0.7) == Category::Ok);
  CHECK(khat_category(0.7001) == Category::Bad);
  CHECK(khat_category(9.8) == Category::Bad);
}

TEST_CASE("snis_estimate") {
  Rng rng = make_rng(3, 0);
  const DrawBatch b = gaussian_batch(0.0, 1.0, 0.0, 1.3, 1000, rng);
  const SmoothedWeights w = smooth(b);
  CHECK(snis_estimate(Eigen::VectorXd::Ones(1000), w) == 1.0);

  // Unit weights give the plain sample mean.
  const std::vector<double> h{1.0, 2.0, 6.0};
  const std::vector<double> ones{1.0, 1.0, 1.0};
  CHECK(snis_estimate(h, ones) == doctest::Approx(3.0));
  CHECK_THROWS_AS(snis_estimate(h, std::vector<double>{0.0, 0.0, 0.0}), DegenerateWeights);
  CHECK_THROWS_AS(snis_estimate(h, std::vector<double>{1.0, 1.0}), InvalidParameter);

  // q = N(0, 1), p = N(0.5, 1): the target mean is 0.5.
  std::vector<double> means;
  for (int seed = 0; seed < 20; ++seed) {
    Rng r = make_rng(seed, 13);
    const DrawBatch mb = gaussian_batch(0.0, 1.0, 0.5, 1.0, 100000, r);
    means.push_back(snis_estimate(mb.draws.col(0), smooth(mb)));
  }
  CHECK(std::abs(oracle::median(means) - 0.5) < 0.02);
}

TEST_CASE("psis_moments") {
  Rng rng = make_rng(4, 0);
  const DrawBatch same = gaussian_batch(0.0, 1.0, 0.0, 1.0, 100000, rng);
  const Moments m = psis_moments(same, smooth(same));
  CHECK(std::abs(m.mean[0]) < 0.015);
  CHECK(std::abs(m.second[0] - 1.0) < 0.02);

  const Moments plain = plain_moments(same.draws);
  CHECK(plain.mean[0] == doctest::Approx(same.draws.col(0).mean()));
  CHECK(plain.second[0] == doctest::Approx(same.draws.col(0).squaredNorm() / 100000.0));
}

TEST_CASE("khat_to_renyi_order") {
  CHECK(khat_to_renyi_order(0.5).alpha == doctest::Approx(2.0));
  CHECK(khat_to_renyi_order(1.0).alpha == doctest::Approx(1.0));
  CHECK(khat_to_renyi_order(0.25).alpha == doctest::Approx(4.0));
  CHECK_FALSE(khat_to_renyi_order(0.25).bounded);
  CHECK(khat_to_renyi_order(0.0).bounded);
  CHECK(khat_to_renyi_order(-0.3).bounded);
}

TEST_CASE("shift invariance") {
  Rng rng = make_rng(5, 0);
  const DrawBatch b = gaussian_batch(0.0, 1.0, 0.3, 1.6, 5000, rng);
  const SmoothedWeights base = smooth(b);
  for (double c : {-100.0, 100.0}) {
    DrawBatch shifted = b;
    shifted.log_target.array() += c;
    const SmoothedWeights w1 = smooth(shifted);
    shifted = b;
    shifted.log_proposal.array() += c;
    const SmoothedWeights w2 = smooth(shifted);
    for (const auto* w : {&w1, &w2}) {
      CHECK(std::abs(w->khat() - base.khat()) < 1e-10);
      CHECK(w->category == base.category);
      CHECK(std::abs(snis_estimate(b.draws.col(0), *w) - snis_estimate(b.draws.col(0), base)) < 1e-10);
    }
  }
}

TEST_CASE("regularization switch") {
  Rng rng = make_rng(6, 0);
  const DrawBatch b = gaussian_batch(0.0, 1.0, 0.0, 3.0, 2000, rng);
  const SmoothedWeights reg = smooth(b);
  const SmoothedWeights raw = smooth(b, PsisOptions{false});
  CHECK(reg.khat() == reg.khat_reg);
  CHECK(raw.khat() == raw.khat_raw);
  CHECK(raw.khat_raw == reg.khat_raw);
  CHECK(reg.khat_reg == doctest::Approx(regularize_khat(reg.khat_raw, reg.pareto_fit->tail_count)));
}

TEST_CASE("reparametrization invariance of the log ratios") {
  // Eight schools: ratios on (theta, mu, tau) with the proposal pushed
  // through exp against ratios on (theta, mu, log tau).
  const auto model = eight_schools(Parametrization::Centered);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(10), omega = Eigen::VectorXd::Zero(10);
  mu.head(8).setConstant(5.0);
  mu[8] = 4.0;
  mu[9] = 1.2;
  omega.head(9).setConstant(std::log(6.0));
  omega[9] = std::log(0.7);
  const MeanFieldGaussian q(mu, omega);
  Rng rng = make_rng(7, 0);
  const DrawBatch b = make_draw_batch(*model, q, 500, rng);
  Eigen::VectorXd lp(500), lq(500);
  for (Eigen::Index s = 0; s < 500; ++s) {
    const Eigen::VectorXd zeta = b.draws.row(s).transpose();
    const Eigen::VectorXd theta = model->to_constrained(zeta);
    lp[s] = model->log_density_constrained(theta);
    lq[s] = q.log_density(zeta) - model->log_abs_det_jacobian(zeta);
  }
  const LogRatios unconstrained = log_ratios(b);
  const LogRatios constrained = log_ratios(std::span<const double>(lp.data(), 500), std::span<const double>(lq.data(), 500));
  CHECK((unconstrained.values - constrained.values).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(psis_smooth(unconstrained.values).khat() == doctest::Approx(psis_smooth(constrained.values).khat()).epsilon(1e-8));
}

TEST_CASE("marginal khat does not exceed joint khat") {
  // Target N(0, [[1, .5], [.5, 1]]), proposal N(0, .75 I): joint shape 0.5,
  // marginal shape 0.25.
  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, 0.5, 0.5, 1.0;
  const AnalyticGaussian target(Eigen::VectorXd::Zero(2), cov);
  const MeanFieldGaussian q(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(2, 0.5 * std::log(0.75)));
  std::vector<double> joint, marginal;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng = make_rng(seed, 14);
    const DrawBatch b = make_draw_batch(target, q, 20000, rng);
    joint.push_back(smooth(b).khat());
    Eigen::VectorXd lp(b.size()), lq(b.size());
    for (Eigen::Index s = 0; s < b.size(); ++s) {
      lp[s] = target.marginal_log_density(0, b.draws(s, 0));
      lq[s] = oracle::normal_log_pdf(b.draws(s, 0), 0.0, std::sqrt(0.75));
    }
    marginal.push_back(psis_smooth(log_ratios(std::span<const double>(lp.data(), lp.size()),
                                              std::span<const double>(lq.data(), lq.size()))
                                       .values)
                           .khat());
  }
  CHECK(oracle::median(marginal) <= oracle::median(joint) + 0.05);
}
