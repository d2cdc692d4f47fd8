#include "vidiag/vi.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

namespace vidiag {

namespace {

constexpr int kRetryFactor = 10;

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), v.end());
  const double upper = v[n / 2];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2));
  return 0.5 * (lower + upper);
}

}  // namespace

void ViConfig::validate() const {
  if (!(tol_rel_obj > 0.0 && tol_rel_obj < 1.0)) throw InvalidParameter("tol_rel_obj must lie in (0, 1)");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidParameter("eta must be positive");
  if (n_mc_grad < 1 || n_mc_elbo < 1) throw InvalidParameter("Monte Carlo sample counts must be positive");
  if (max_iters < 1 || eval_every < 1) throw InvalidParameter("max_iters and eval_every must be positive");
}

double elbo_estimate(const MeanFieldGaussian& q, const Model& model, int n_mc, Rng& rng) {
  if (q.dim() != model.dim()) throw InvalidParameter("variational and model dimensions differ");
  double sum = 0.0;
  int accepted = 0;
  int rejected = 0;
  while (accepted < n_mc) {
    const double lp = model.log_joint(q.sample(rng));
    if (!std::isfinite(lp)) {
      if (++rejected > kRetryFactor * n_mc) throw Error("log joint is non-finite at too many ELBO draws");
      continue;
    }
    sum += lp;
    ++accepted;
  }
  return sum / n_mc + q.entropy();
}

double elbo_estimate(const MeanFieldGaussian& q, const Model& model, const Eigen::MatrixXd& z) {
  double sum = 0.0;
  for (Eigen::Index s = 0; s < z.rows(); ++s) sum += model.log_joint(q.transform(z.row(s).transpose()));
  return sum / static_cast<double>(z.rows()) + q.entropy();
}

ElboGradient elbo_gradient(const MeanFieldGaussian& q, const Model& model, const Eigen::MatrixXd& z) {
  const Eigen::Index k = q.dim();
  const Eigen::VectorXd sd = q.sd();
  ElboGradient g{Eigen::VectorXd::Zero(k), Eigen::VectorXd::Zero(k)};
  Eigen::VectorXd grad;
  for (Eigen::Index s = 0; s < z.rows(); ++s) {
    const Eigen::VectorXd zs = z.row(s).transpose();
    model.log_joint_grad(q.mu + (sd.array() * zs.array()).matrix(), grad);
    g.mu += grad;
    g.omega.array() += grad.array() * zs.array() * sd.array();
  }
  const double n = static_cast<double>(z.rows());
  g.mu /= n;
  g.omega /= n;
  g.omega.array() += 1.0;
  return g;
}

ElboGradient elbo_gradient(const MeanFieldGaussian& q, const Model& model, int n_mc, Rng& rng) {
  if (q.dim() != model.dim()) throw InvalidParameter("variational and model dimensions differ");
  const Eigen::Index k = q.dim();
  const Eigen::VectorXd sd = q.sd();
  ElboGradient g{Eigen::VectorXd::Zero(k), Eigen::VectorXd::Zero(k)};
  Eigen::VectorXd grad;
  int accepted = 0;
  int rejected = 0;
  while (accepted < n_mc) {
    const Eigen::VectorXd z = standard_normal_vector(rng, k);
    const double lp = model.log_joint_grad(q.mu + (sd.array() * z.array()).matrix(), grad);
    if (!std::isfinite(lp) || !grad.allFinite()) {
      if (++rejected > kRetryFactor * n_mc) throw Error("log joint is non-finite at too many gradient draws");
      continue;
    }
    g.mu += grad;
    g.omega.array() += grad.array() * z.array() * sd.array();
    ++accepted;
  }
  g.mu /= n_mc;
  g.omega /= n_mc;
  g.omega.array() += 1.0;
  return g;
}

ViFit advi_fit(const Model& model, const ViConfig& config) {
  return advi_fit(model, config, MeanFieldGaussian::standard(model.dim()));
}

ViFit advi_fit(const Model& model, const ViConfig& config, MeanFieldGaussian init) {
  config.validate();
  if (init.dim() != model.dim()) throw InvalidParameter("initial variational dimension differs from model");

  Rng rng(config.seed);
  ViFit fit;
  fit.q = std::move(init);
  const Eigen::Index k = model.dim();
  Eigen::VectorXd acc_mu = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd acc_omega = Eigen::VectorXd::Zero(k);

  std::deque<double> window;
  double previous = std::numeric_limits<double>::quiet_NaN();

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    ElboGradient g;
    try {
      g = elbo_gradient(fit.q, model, config.n_mc_grad, rng);
    } catch (const OptimizerDiverged&) {
      throw;
    } catch (const Error& e) {
      throw OptimizerDiverged(std::string("gradient evaluation failed: ") + e.what(), fit.trace);
    }
    acc_mu.array() += g.mu.array().square();
    acc_omega.array() += g.omega.array().square();
    fit.q.mu.array() += config.eta * g.mu.array() / (kStepStabilizer + acc_mu.array().sqrt());
    fit.q.omega.array() += config.eta * g.omega.array() / (kStepStabilizer + acc_omega.array().sqrt());
    fit.iterations = iter;

    if (!fit.q.all_finite()) {
      throw OptimizerDiverged("variational parameters became non-finite at iteration " + std::to_string(iter),
                              fit.trace);
    }

    if (iter % config.eval_every != 0) continue;

    double elbo = std::numeric_limits<double>::quiet_NaN();
    try {
      elbo = elbo_estimate(fit.q, model, config.n_mc_elbo, rng);
    } catch (const Error&) {
    }
    ElboTraceEntry entry;
    entry.iteration = iter;
    entry.elbo = elbo;
    if (!std::isfinite(elbo)) {
      fit.trace.push_back(entry);
      throw OptimizerDiverged("ELBO became non-finite at iteration " + std::to_string(iter), fit.trace);
    }

    if (std::isnan(previous)) {
      entry.rel_change = std::numeric_limits<double>::infinity();
      entry.window_mean = entry.window_median = std::numeric_limits<double>::infinity();
      fit.trace.push_back(entry);
      previous = elbo;
      continue;
    }

    entry.rel_change = std::abs((elbo - previous) / previous);
    previous = elbo;
    window.push_back(entry.rel_change);
    if (window.size() > kConvergenceWindow) window.pop_front();
    const std::vector<double> values(window.begin(), window.end());
    entry.window_mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    entry.window_median = median(values);
    fit.trace.push_back(entry);

    if (entry.window_mean < config.tol_rel_obj || entry.window_median < config.tol_rel_obj) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

ProposalDraws sample_q(const MeanFieldGaussian& q, std::size_t count, Rng& rng) {
  const Eigen::Index k = q.dim();
  const auto s_count = static_cast<Eigen::Index>(count);
  ProposalDraws out{Eigen::MatrixXd(s_count, k), Eigen::VectorXd(s_count)};
  const Eigen::VectorXd sd = q.sd();
  const double log_norm = -q.omega.sum() - static_cast<double>(k) * kLogSqrtTwoPi;
  for (Eigen::Index s = 0; s < s_count; ++s) {
    const Eigen::VectorXd z = standard_normal_vector(rng, k);
    out.draws.row(s) = (q.mu.array() + sd.array() * z.array()).transpose();
    out.log_q[s] = log_norm - 0.5 * z.squaredNorm();
  }
  return out;
}

DrawBatch make_draw_batch(const Model& model, const MeanFieldGaussian& q, std::size_t count, Rng& rng) {
  ProposalDraws d = sample_q(q, count, rng);
  DrawBatch batch;
  batch.log_target.resize(d.draws.rows());
  for (Eigen::Index s = 0; s < d.draws.rows(); ++s) batch.log_target[s] = model.log_joint(d.draws.row(s).transpose());
  batch.draws = std::move(d.draws);
  batch.log_proposal = std::move(d.log_q);
  return batch;
}

}  // namespace vidiag
