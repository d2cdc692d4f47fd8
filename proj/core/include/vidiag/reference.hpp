#ifndef VIDIAG_REFERENCE_HPP
#define VIDIAG_REFERENCE_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vidiag/models.hpp"
#include "vidiag/psis.hpp"
#include "vidiag/random.hpp"

namespace vidiag {

/// Post-warmup random-walk Metropolis draws on the unconstrained scale.
struct McmcChain {
  Eigen::MatrixXd draws;  ///< T x K
  double acceptance_rate = 0.0;
  std::size_t warmup = 0;
  double step_scale = 0.0;  ///< frozen proposal scale
};

struct MetropolisOptions {
  double target_acceptance = 0.234;
  /// Precondition proposals with the covariance of the first half of warmup.
  bool adapt_covariance = true;
  /// Starting point; empty means the origin.
  Eigen::VectorXd init;
};

/// min(1, exp(log_proposed - log_current)) for a symmetric proposal.
double metropolis_accept_probability(double log_current, double log_proposed);

/// Gaussian random-walk Metropolis. During warmup the log step size follows
/// a Robbins-Monro recursion toward the target acceptance rate; afterwards
/// the proposal is frozen. Returns `draws` post-warmup states. Throws Error
/// if the log density is non-finite at the start or nothing is accepted
/// after warmup.
McmcChain metropolis_sample(const Model& model, std::size_t draws, std::size_t warmup, Rng& rng,
                            const MetropolisOptions& options = {});

/// Per-coordinate first and second moments of the chain.
Moments chain_moments(const McmcChain& chain);

struct RmseResult {
  Eigen::VectorXd first_error;   ///< estimate.mean - reference.mean
  Eigen::VectorXd second_error;  ///< estimate.second - reference.second
  double first = 0.0;            ///< Euclidean norm of first_error
  double second = 0.0;
};

RmseResult rmse_vs_reference(const Moments& estimate, const Moments& reference);

void write_chain_csv(std::ostream& out, const McmcChain& chain, const std::vector<std::string>& names);

}  // namespace vidiag

#endif
