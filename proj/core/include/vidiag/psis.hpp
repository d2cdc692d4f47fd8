#ifndef VIDIAG_PSIS_HPP
#define VIDIAG_PSIS_HPP

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "vidiag/gpd.hpp"

namespace vidiag {

/// S draws from a proposal with their unnormalized log-target and
/// log-proposal densities (nats). draws may have zero columns when only the
/// densities are known.
struct DrawBatch {
  Eigen::MatrixXd draws;         ///< S x K, unconstrained scale
  Eigen::VectorXd log_target;    ///< log p(theta_s, y)
  Eigen::VectorXd log_proposal;  ///< log q(theta_s)

  Eigen::Index size() const { return log_target.size(); }
  Eigen::Index dim() const { return draws.cols(); }

  /// Throws InputError tagged with the 0-based draw index on the first
  /// non-finite density or draw, and InvalidParameter on shape mismatch.
  void validate() const;
};

/// Minimum number of draws for smoothing (gives a tail of at least 5).
inline constexpr std::size_t kMinSmoothingDraws = 25;

enum class Category { Good, Ok, Bad };

std::string_view to_string(Category c);

/// khat < 0.5 is Good, 0.5 <= khat <= 0.7 is Ok, khat > 0.7 is Bad.
Category khat_category(double khat);

/// Log importance ratios shifted so that their maximum is zero.
struct LogRatios {
  Eigen::VectorXd values;
  double shift = 0.0;  ///< the subtracted maximum
};

LogRatios log_ratios(const DrawBatch& batch);
LogRatios log_ratios(std::span<const double> log_target, std::span<const double> log_proposal);

/// Tail length min(floor(S / 5), ceil(3 sqrt(S))).
std::size_t psis_tail_length(std::size_t draws);

struct PsisOptions {
  /// Report and smooth with the regularized shape instead of the raw one.
  bool regularize = true;
};

struct SmoothedWeights {
  Eigen::VectorXd log_weights;  ///< smoothed and truncated, max raw ratio at 0
  Eigen::VectorXd weights;      ///< exp(log_weights)
  double khat_raw = std::numeric_limits<double>::quiet_NaN();
  double khat_reg = std::numeric_limits<double>::quiet_NaN();
  std::optional<ParetoFit> pareto_fit;
  Category category = Category::Bad;
  std::size_t tail_count = 0;
  bool regularized = true;
  bool fit_failed = false;
  /// Every log ratio is identical: q equals p up to a constant, no tail to fit.
  bool constant_ratios = false;

  /// The shape used for the category: khat_reg when regularized, else khat_raw.
  double khat() const { return regularized ? khat_reg : khat_raw; }
  bool khat_available() const { return pareto_fit.has_value(); }
};

/// Pareto-smoothed importance weights. The M largest ratios are replaced
/// by fitted GPD quantiles at plotting positions (z - 0.5) / M in rank
/// order, then all weights are truncated at the raw maximum. Throws
/// InvalidParameter for fewer than 25 ratios.
SmoothedWeights psis_smooth(std::span<const double> log_ratios, const PsisOptions& options = {});

inline SmoothedWeights psis_smooth(const Eigen::VectorXd& log_ratios,
                                   const PsisOptions& options = {}) {
  return psis_smooth(std::span<const double>(log_ratios.data(), static_cast<std::size_t>(log_ratios.size())),
                     options);
}

/// Self-normalized estimate sum(h w) / sum(w). Throws DegenerateWeights for
/// a zero weight sum and InvalidParameter on length mismatch.
double snis_estimate(std::span<const double> h, std::span<const double> weights);
double snis_estimate(const Eigen::VectorXd& h, const SmoothedWeights& weights);

struct Moments {
  Eigen::VectorXd mean;
  Eigen::VectorXd second;  ///< E[theta_i^2]
};

/// Per-coordinate self-normalized first and second moments.
Moments psis_moments(const DrawBatch& batch, const SmoothedWeights& weights);
Moments weighted_moments(const Eigen::MatrixXd& draws, const Eigen::VectorXd& weights);
/// Equal-weight sample moments (the plain VI estimate).
Moments plain_moments(const Eigen::MatrixXd& draws);

/// Largest finite Renyi order implied by khat. For khat <= 0 the ratios are
/// bounded and every positive order is finite (bounded = true, alpha = inf).
struct RenyiOrder {
  double alpha;
  bool bounded;
};

RenyiOrder khat_to_renyi_order(double khat);

}  // namespace vidiag

#endif
