#include "vidiag/reference.hpp"

#include <cmath>
#include <ostream>

#include "vidiag/csv.hpp"
#include "vidiag/error.hpp"

namespace vidiag {

double metropolis_accept_probability(double log_current, double log_proposed) {
  if (!std::isfinite(log_proposed)) return 0.0;
  const double diff = log_proposed - log_current;
  return diff >= 0.0 ? 1.0 : std::exp(diff);
}

McmcChain metropolis_sample(const Model& model, std::size_t draws, std::size_t warmup, Rng& rng,
                            const MetropolisOptions& options) {
  if (draws < 1) throw InvalidParameter("Metropolis needs at least one post-warmup draw");
  const Eigen::Index k = model.dim();
  Eigen::VectorXd x = options.init.size() == k ? options.init : Eigen::VectorXd::Zero(k);
  double lp = model.log_joint(x);
  if (!std::isfinite(lp)) throw Error("log density is not finite at the initial point");

  Eigen::MatrixXd chol = Eigen::MatrixXd::Identity(k, k);
  double log_scale = std::log(2.38 / std::sqrt(static_cast<double>(k)));
  const std::size_t covariance_point = warmup / 2;
  Eigen::MatrixXd warm_draws(static_cast<Eigen::Index>(covariance_point), k);

  McmcChain chain;
  chain.warmup = warmup;
  chain.draws.resize(static_cast<Eigen::Index>(draws), k);
  std::size_t accepted_after_warmup = 0;
  std::size_t adapt_step = 0;

  for (std::size_t t = 0; t < warmup + draws; ++t) {
    const Eigen::VectorXd proposal = x + std::exp(log_scale) * (chol * standard_normal_vector(rng, k));
    const double lp_new = model.log_joint(proposal);
    const double accept = metropolis_accept_probability(lp, lp_new);
    const bool take = uniform_open(rng) < accept;
    if (take) {
      x = proposal;
      lp = lp_new;
    }

    if (t < warmup) {
      ++adapt_step;
      log_scale += (accept - options.target_acceptance) / std::pow(static_cast<double>(adapt_step), 0.6);
      if (t < covariance_point) warm_draws.row(static_cast<Eigen::Index>(t)) = x.transpose();
      if (options.adapt_covariance && t + 1 == covariance_point && covariance_point > 2 * static_cast<std::size_t>(k)) {
        // Second half of the first warmup phase; the start may still be transient.
        const Eigen::Index half = static_cast<Eigen::Index>(covariance_point / 2);
        const Eigen::MatrixXd tail = warm_draws.bottomRows(warm_draws.rows() - half);
        const Eigen::RowVectorXd mean = tail.colwise().mean();
        const Eigen::MatrixXd centered = tail.rowwise() - mean;
        Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(std::max<Eigen::Index>(tail.rows() - 1, 1));
        cov.diagonal().array() += 1e-8 * (1.0 + cov.diagonal().array());
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() == Eigen::Success) {
          chol = llt.matrixL();
          log_scale = std::log(2.38 / std::sqrt(static_cast<double>(k)));
          adapt_step = 0;
        }
      }
    } else {
      chain.draws.row(static_cast<Eigen::Index>(t - warmup)) = x.transpose();
      if (take) ++accepted_after_warmup;
    }
  }
  chain.acceptance_rate = static_cast<double>(accepted_after_warmup) / static_cast<double>(draws);
  chain.step_scale = std::exp(log_scale);
  if (accepted_after_warmup == 0) throw Error("Metropolis adaptation failed: no proposal accepted after warmup");
  return chain;
}

Moments chain_moments(const McmcChain& chain) { return plain_moments(chain.draws); }

RmseResult rmse_vs_reference(const Moments& estimate, const Moments& reference) {
  if (estimate.mean.size() != reference.mean.size() || estimate.second.size() != reference.second.size()) {
    throw InvalidParameter("moment vectors have different lengths");
  }
  RmseResult r;
  r.first_error = estimate.mean - reference.mean;
  r.second_error = estimate.second - reference.second;
  r.first = r.first_error.norm();
  r.second = r.second_error.norm();
  return r;
}

void write_chain_csv(std::ostream& out, const McmcChain& chain, const std::vector<std::string>& names) {
  write_csv_header(out, names);
  std::vector<double> row(static_cast<std::size_t>(chain.draws.cols()));
  for (Eigen::Index t = 0; t < chain.draws.rows(); ++t) {
    for (Eigen::Index j = 0; j < chain.draws.cols(); ++j) row[static_cast<std::size_t>(j)] = chain.draws(t, j);
    write_csv_row(out, row);
  }
}

}  // namespace vidiag
