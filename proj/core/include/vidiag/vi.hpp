#ifndef VIDIAG_VI_HPP
#define VIDIAG_VI_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "vidiag/error.hpp"
#include "vidiag/mean_field.hpp"
#include "vidiag/models.hpp"
#include "vidiag/psis.hpp"
#include "vidiag/random.hpp"

namespace vidiag {

struct ViConfig {
  double tol_rel_obj = 0.01;  ///< stop when the windowed mean or median relative ELBO change drops below this
  double eta = 0.1;           ///< base step size
  int n_mc_grad = 1;          ///< draws per gradient estimate
  int n_mc_elbo = 100;        ///< draws per ELBO estimate
  int max_iters = 10000;
  int eval_every = 100;       ///< iterations between ELBO evaluations
  std::uint64_t seed = 0;

  /// Throws InvalidParameter unless every field is positive and tol_rel_obj < 1.
  void validate() const;
};

/// Number of relative ELBO changes in the running mean and median.
inline constexpr std::size_t kConvergenceWindow = 10;
/// Added to the root of the accumulated squared gradient.
inline constexpr double kStepStabilizer = 1e-8;

struct ElboTraceEntry {
  int iteration = 0;
  double elbo = 0.0;
  double rel_change = 0.0;    ///< |elbo - previous| / |previous|; inf for the first entry
  double window_mean = 0.0;
  double window_median = 0.0;
};

struct ViFit {
  MeanFieldGaussian q;
  std::vector<ElboTraceEntry> trace;
  int iterations = 0;
  bool converged = false;  ///< false when max_iters was reached
};

/// The ELBO became non-finite. Carries the trace up to that point.
class OptimizerDiverged : public Error {
 public:
  OptimizerDiverged(const std::string& what, std::vector<ElboTraceEntry> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<ElboTraceEntry>& trace() const noexcept { return trace_; }

 private:
  std::vector<ElboTraceEntry> trace_;
};

/// Monte Carlo estimate of E_q[log p(zeta, y)] plus the exact entropy of q.
/// Draws with a non-finite log joint are redrawn, up to 10 * n_mc times in
/// total, after which Error is thrown.
double elbo_estimate(const MeanFieldGaussian& q, const Model& model, int n_mc, Rng& rng);

/// Reparameterization gradient of the ELBO with respect to (mu, omega).
struct ElboGradient {
  Eigen::VectorXd mu;
  Eigen::VectorXd omega;
};

ElboGradient elbo_gradient(const MeanFieldGaussian& q, const Model& model, int n_mc, Rng& rng);

/// Same estimator on fixed standard-normal draws (rows of z). Used for
/// common-random-number checks.
ElboGradient elbo_gradient(const MeanFieldGaussian& q, const Model& model, const Eigen::MatrixXd& z);
double elbo_estimate(const MeanFieldGaussian& q, const Model& model, const Eigen::MatrixXd& z);

/// Stochastic gradient ascent on the ELBO from mu = 0, omega = 0 with
/// per-coordinate steps eta * g / (1e-8 + sqrt(sum of squared gradients)).
ViFit advi_fit(const Model& model, const ViConfig& config);
ViFit advi_fit(const Model& model, const ViConfig& config, MeanFieldGaussian init);

struct ProposalDraws {
  Eigen::MatrixXd draws;   ///< S x K
  Eigen::VectorXd log_q;
};

ProposalDraws sample_q(const MeanFieldGaussian& q, std::size_t count, Rng& rng);

/// Draws from q with model log joints attached, ready for PSIS.
DrawBatch make_draw_batch(const Model& model, const MeanFieldGaussian& q, std::size_t count, Rng& rng);

}  // namespace vidiag

#endif
