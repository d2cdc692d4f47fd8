#ifndef VIDIAG_MEAN_FIELD_HPP
#define VIDIAG_MEAN_FIELD_HPP

#include <Eigen/Dense>

#include "vidiag/random.hpp"

namespace vidiag {

/// Fully factorized Gaussian on the unconstrained scale, parameterized by
/// means and log standard deviations.
struct MeanFieldGaussian {
  Eigen::VectorXd mu;
  Eigen::VectorXd omega;

  MeanFieldGaussian() = default;
  MeanFieldGaussian(Eigen::VectorXd mean, Eigen::VectorXd log_sd)
      : mu(std::move(mean)), omega(std::move(log_sd)) {}

  /// mu = 0, omega = 0.
  static MeanFieldGaussian standard(Eigen::Index dim) {
    return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Zero(dim)};
  }

  Eigen::Index dim() const { return mu.size(); }
  Eigen::VectorXd sd() const { return omega.array().exp(); }

  /// mu + exp(omega) * z.
  Eigen::VectorXd transform(const Eigen::VectorXd& z) const {
    return mu + (omega.array().exp() * z.array()).matrix();
  }

  double log_density(const Eigen::VectorXd& x) const;

  /// Closed form: sum(omega) + K/2 (1 + log 2 pi).
  double entropy() const;

  Eigen::VectorXd sample(Rng& rng) const { return transform(standard_normal_vector(rng, dim())); }

  bool all_finite() const { return mu.allFinite() && omega.allFinite(); }
};

double normal_cdf(double x);
double normal_log_pdf(double x, double mean, double sd);

inline constexpr double kLogSqrtTwoPi = 0.91893853320467274178;

}  // namespace vidiag

#endif
