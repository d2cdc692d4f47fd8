#ifndef VIDIAG_VSBC_HPP
#define VIDIAG_VSBC_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "vidiag/error.hpp"
#include "vidiag/ks.hpp"
#include "vidiag/mean_field.hpp"
#include "vidiag/models.hpp"
#include "vidiag/vi.hpp"

namespace vidiag {

/// Direction of asymmetry of calibration probabilities p = Pr(theta0 < theta*).
/// Mass piled toward 1 (RightSkewed) means the approximation sits above the
/// generating value on average, i.e. over-estimation.
enum class Skew { Symmetric, RightSkewed, LeftSkewed };

std::string_view to_string(Skew s);

/// Pr(theta0_i < theta*_i) for theta* ~ q pushed through the model's
/// transform. Uses the exact normal CDF when quantity i is a monotone
/// function of one unconstrained coordinate. Otherwise estimates it from
/// mc_draws draws of q and requires rng.
double calibration_prob(const MeanFieldGaussian& q, const Model& model, const Eigen::VectorXd& theta0,
                        Eigen::Index quantity, Rng* rng = nullptr, std::size_t mc_draws = 1000);

/// Normal-CDF form on the unconstrained scale: 1 - Phi((zeta0 - mu) / sd).
double calibration_prob_normal(double mu, double sd, double zeta0);

struct MarginResult {
  std::string name;
  Eigen::Index quantity = 0;
  KsResult two_sided;
  KsResult less;     ///< alternative: p stochastically larger than 1 - p
  KsResult greater;  ///< alternative: p stochastically smaller than 1 - p
  Skew skew = Skew::Symmetric;
  Histogram histogram;
};

/// KS comparison of {p} with {1 - p} and the resulting skew flag at level alpha.
MarginResult symmetry_test(std::span<const double> p, double alpha, std::size_t n_bins = 10);

struct VsbcConfig {
  std::size_t replications = 100;
  double alpha = 0.05;
  /// Quantity names to test (pre-registered); empty tests every quantity.
  std::vector<std::string> margins;
  ViConfig vi;
  /// Replace the VI fit with the model's exact posterior.
  bool oracle = false;
  /// Test hook: added to the fitted means before computing probabilities.
  Eigen::VectorXd mu_shift;
  std::size_t mc_draws = 1000;
  double max_failure_fraction = 0.2;
  std::size_t n_bins = 10;
};

struct VsbcReport {
  std::vector<std::string> margin_names;
  Eigen::MatrixXd pvals;  ///< successful replications x margins
  std::vector<std::size_t> replication_index;
  std::vector<MarginResult> margins;
  std::size_t replications = 0;
  std::size_t failures = 0;
  double alpha = 0.05;
  /// alpha times the number of margins: flags expected under exact calibration.
  double expected_false_flags = 0.0;
};

/// More than the allowed fraction of replications failed to fit.
class VsbcAborted : public Error {
 public:
  VsbcAborted(const std::string& what, std::size_t failures, std::size_t replications)
      : Error(what), failures_(failures), replications_(replications) {}
  std::size_t failures() const noexcept { return failures_; }
  std::size_t replications() const noexcept { return replications_; }

 private:
  std::size_t failures_;
  std::size_t replications_;
};

/// Simulation-based calibration of a VI point estimate: for each
/// replication draw theta0 from the prior, simulate data, fit, and record
/// calibration probabilities; then test each margin for symmetry.
/// Replication j uses the stream derive_seed(seed, j), so the report is
/// independent of thread scheduling.
VsbcReport vsbc_run(const Model& model, const VsbcConfig& config, std::uint64_t seed);

}  // namespace vidiag

#endif
