#ifndef VIDIAG_MODELS_HPP
#define VIDIAG_MODELS_HPP

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "vidiag/mean_field.hpp"
#include "vidiag/random.hpp"

namespace vidiag {

/// Uniform contract for a Bayesian model bound to one dataset.
///
/// Inference runs on the unconstrained vector zeta; positive parameters are
/// log-transformed and log_joint includes the log-Jacobian of that map.
/// "Quantities" are the constrained parameters a user reports on; two
/// parametrizations of the same model expose the same quantity names.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index dim() const = 0;

  /// Labels of the unconstrained coordinates (e.g. "log_tau").
  virtual std::vector<std::string> param_names() const = 0;
  /// Labels of the constrained quantities (e.g. "tau").
  virtual std::vector<std::string> quantity_names() const = 0;

  /// log p(zeta, y) on the unconstrained scale, Jacobian included.
  virtual double log_joint(const Eigen::VectorXd& zeta) const = 0;
  /// Same value; writes the analytic gradient into grad.
  virtual double log_joint_grad(const Eigen::VectorXd& zeta, Eigen::VectorXd& grad) const = 0;

  virtual Eigen::VectorXd to_constrained(const Eigen::VectorXd& zeta) const = 0;
  virtual Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& theta) const = 0;
  /// log |det d theta / d zeta|.
  virtual double log_abs_det_jacobian(const Eigen::VectorXd& zeta) const = 0;

  /// Joint density of quantities and data, without any Jacobian. The
  /// default goes through log_joint; models override it with a direct
  /// formula where one exists.
  virtual double log_density_constrained(const Eigen::VectorXd& theta) const;

  /// Unconstrained coordinate that alone determines quantity i through an
  /// increasing map, if any.
  virtual std::optional<Eigen::Index> quantity_coordinate(Eigen::Index i) const = 0;

  /// Constrained parameter draw from the prior.
  virtual Eigen::VectorXd sample_prior(Rng& rng) const = 0;
  /// The same model with a dataset simulated from p(y | theta).
  virtual std::unique_ptr<Model> simulate(const Eigen::VectorXd& theta, Rng& rng) const = 0;

  /// Exact posterior, for models where it is a mean-field Gaussian.
  virtual std::optional<MeanFieldGaussian> exact_posterior() const { return std::nullopt; }

  /// Dataset as CSV with a header row.
  virtual void write_data_csv(std::ostream& out) const = 0;
};

/// Index of a quantity by name. Also accepts "log_<name>" for a positive
/// quantity, since calibration probabilities are invariant to the monotone
/// log map. Throws InvalidParameter when unknown.
Eigen::Index resolve_quantity(const Model& model, std::string_view name);

/// Design and response of a regression dataset.
struct RegressionData {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

/// x_1..x_K,y columns.
void write_regression_csv(std::ostream& out, const RegressionData& data);
RegressionData read_regression_csv(std::istream& in);

/// Rows i.i.d. N(0, (1 - rho) I + rho 11').
Eigen::MatrixXd correlated_design(Eigen::Index n, Eigen::Index k, double rho, Rng& rng);

// --- Analytic and conjugate targets -----------------------------------------

/// Gaussian target N(mean, cov) with identity transform. Used as an oracle
/// target: marginals and the closed-form k for Gaussian proposals are known.
class AnalyticGaussian final : public Model {
 public:
  AnalyticGaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov);

  std::string name() const override { return "analytic_gaussian"; }
  Eigen::Index dim() const override { return mean_.size(); }
  std::vector<std::string> param_names() const override;
  std::vector<std::string> quantity_names() const override { return param_names(); }
  double log_joint(const Eigen::VectorXd& zeta) const override;
  double log_joint_grad(const Eigen::VectorXd& zeta, Eigen::VectorXd& grad) const override;
  Eigen::VectorXd to_constrained(const Eigen::VectorXd& zeta) const override { return zeta; }
  Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& theta) const override { return theta; }
  double log_abs_det_jacobian(const Eigen::VectorXd&) const override { return 0.0; }
  std::optional<Eigen::Index> quantity_coordinate(Eigen::Index i) const override { return i; }
  Eigen::VectorXd sample_prior(Rng& rng) const override;
  std::unique_ptr<Model> simulate(const Eigen::VectorXd& theta, Rng& rng) const override;
  std::optional<MeanFieldGaussian> exact_posterior() const override;
  void write_data_csv(std::ostream& out) const override;

  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  double marginal_log_density(Eigen::Index i, double x) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd precision_;
  Eigen::MatrixXd chol_;  // lower Cholesky factor of cov
  double log_norm_ = 0.0;
};

/// Independent N(mean_i, sd_i^2) coordinates.
std::unique_ptr<AnalyticGaussian> analytic_gaussian(const Eigen::VectorXd& mean, const Eigen::VectorXd& sd);

/// Conjugate normal means: theta_i ~ N(0, prior_sd^2), y_ij ~ N(theta_i,
/// noise_sd^2) for n observations per coordinate, noise_sd known. The
/// posterior factorizes, so the exact posterior is a mean-field Gaussian.
class ConjugateNormal final : public Model {
 public:
  ConjugateNormal(Eigen::MatrixXd observations, double prior_sd, double noise_sd);

  /// Data simulated from the prior with the given stream.
  static std::unique_ptr<ConjugateNormal> synthetic(Eigen::Index k, Eigen::Index n, double prior_sd,
                                                    double noise_sd, Rng& rng);

  std::string name() const override { return "conjugate_normal"; }
  Eigen::Index dim() const override { return obs_.rows(); }
  std::vector<std::string> param_names() const override;
  std::vector<std::string> quantity_names() const override { return param_names(); }
  double log_joint(const Eigen::VectorXd& zeta) const override;
  double log_joint_grad(const Eigen::VectorXd& zeta, Eigen::VectorXd& grad) const override;
  Eigen::VectorXd to_constrained(const Eigen::VectorXd& zeta) const override { return zeta; }
  Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& theta) const override { return theta; }
  double log_abs_det_jacobian(const Eigen::VectorXd&) const override { return 0.0; }
  std::optional<Eigen::Index> quantity_coordinate(Eigen::Index i) const override { return i; }
  Eigen::VectorXd sample_prior(Rng& rng) const override;
  std::unique_ptr<Model> simulate(const Eigen::VectorXd& theta, Rng& rng) const override;
  std::optional<MeanFieldGaussian> exact_posterior() const override;
  void write_data_csv(std::ostream& out) const override;

  /// K x n observation matrix.
  const Eigen::MatrixXd& observations() const { return obs_; }
  double prior_sd() const { return prior_sd_; }
  double noise_sd() const { return noise_sd_; }

 private:
  Eigen::MatrixXd obs_;
  double prior_sd_;
  double noise_sd_;
  Eigen::VectorXd sum_y_;
  Eigen::VectorXd sum_y2_;
};

// --- Regression models -------------------------------------------------------

/// y ~ N(X beta, sigma^2), beta_i ~ N(0, prior_sd^2), sigma ~ Gamma(shape,
/// rate). Unconstrained coordinates (beta_1..beta_K, log_sigma).
class LinearRegression final : public Model {
 public:
  LinearRegression(RegressionData data, double prior_sd = 1.0, double sigma_shape = 0.5,
                   double sigma_rate = 0.5);

  std::string name() const override { return "linear_regression"; }
  Eigen::Index dim() const override { return k_ + 1; }
  std::vector<std::string> param_names() const override;
  std::vector<std::string> quantity_names() const override;
  double log_joint(const Eigen::VectorXd& zeta) const override;
  double log_joint_grad(const Eigen::VectorXd& zeta, Eigen::VectorXd& grad) const override;
  Eigen::VectorXd to_constrained(const Eigen::VectorXd& zeta) const override;
  Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& theta) const override;
  double log_abs_det_jacobian(const Eigen::VectorXd& zeta) const override { return zeta[k_]; }
  double log_density_constrained(const Eigen::VectorXd& theta) const override;
  std::optional<Eigen::Index> quantity_coordinate(Eigen::Index i) const override { return i; }
  Eigen::VectorXd sample_prior(Rng& rng) const override;
  std::unique_ptr<Model> simulate(const Eigen::VectorXd& theta, Rng& rng) const override;
  void write_data_csv(std::ostream& out) const override;

  const RegressionData& data() const { return data_; }

 private:
  double log_prior_and_lik(const Eigen::VectorXd& beta, double log_sigma, Eigen::VectorXd* grad) const;

  RegressionData data_;
  Eigen::Index n_;
  Eigen::Index k_;
  double prior_sd_;
  double shape_;
  double rate_;
  Eigen::MatrixXd xtx_;
  Eigen::VectorXd xty_;
  double yty_;
};

/// Design X ~ N(0, I) and a response drawn at the given parameters.
std::unique_ptr<LinearRegression> linear_regression(Eigen::Index n, Eigen::Index k, const Eigen::VectorXd& beta,
                                                    double sigma, Rng& rng);

/// Bernoulli-logit regression without intercept. prior_sd = 0 gives the
/// flat (improper) prior; sample_prior then still draws beta ~ N(0, 2^2) so
/// the model can be replicated.
class LogisticRegression final : public Model {
 public:
  explicit LogisticRegression(RegressionData data, double prior_sd = 0.0);

  std::string name() const override { return "logistic_regression"; }
  Eigen::Index dim() const override { return data_.x.cols(); }
  std::vector<std::string> param_names() const override;
  std::vector<std::string> quantity_names() const override { return param_names(); }
  double log_joint(const Eigen::VectorXd& zeta) const override;
  double log_joint_grad(const Eigen::VectorXd& zeta, Eigen::VectorXd& grad) const override;
  Eigen::VectorXd to_constrained(const Eigen::VectorXd& zeta) const override { return zeta; }
  Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& theta) const override { return theta; }
  double log_abs_det_jacobian(const Eigen::VectorXd&) const override { return 0.0; }
  std::optional<Eigen::Index> quantity_coordinate(Eigen::Index i) const override { return i; }
  Eigen::VectorXd sample_prior(Rng& rng) const override;
  std::unique_ptr<Model> simulate(const Eigen::VectorXd& theta, Rng& rng) const override;
  void write_data_csv(std::ostream& out) const override;

  const RegressionData& data() const { return data_; }
  double prior_sd() const { return prior_sd_; }

  /// Standard deviation used by sample_prior when the prior is flat.
  static constexpr double kReplicationPriorSd = 2.0;

 private:
  RegressionData data_;
  double prior_sd_;
};

std::unique_ptr<LogisticRegression> logistic_regression(Eigen::Index n, Eigen::Index k, double rho,
                                                        const Eigen::VectorXd& beta, Rng& rng,
                                                        double prior_sd = 0.0);

/// Bernoulli responses for design x at coefficients beta.
Eigen::VectorXd simulate_logistic_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta, Rng& rng);

/// Mean over test points of log( sum_s w_s p(y_i | beta_s) / sum_s w_s ).
/// draws is S x K; equal weights when weights is empty.
double logistic_log_predictive_density(const Eigen::MatrixXd& draws, const Eigen::VectorXd& weights,
                                       const RegressionData& test);

// --- Eight schools -------------------------------------------------------------

enum class Parametrization { Centered, NonCentered };

/// Hierarchical normal model: y_j ~ N(theta_j, sigma_j), theta_j ~ N(mu,
/// tau), mu ~ N(0, 5), tau ~ half-Cauchy(0, 5). sigma_j are known. The
/// non-centered form samples theta_tilde_j = (theta_j - mu) / tau instead.
/// Quantities are (theta_1..theta_J, mu, tau) in both forms.
class EightSchools final : public Model {
 public:
  EightSchools(Parametrization p, Eigen::VectorXd y, Eigen::VectorXd sigma);

  /// School-level data of the SAT coaching experiments.
  static Eigen::VectorXd observed_effects();
  static Eigen::VectorXd observed_sd();

  std::string name() const override;
  Eigen::Index dim() const override { return y_.size() + 2; }
  std::vector<std::string> param_names() const override;
  std::vector<std::string> quantity_names() const override;
  double log_joint(const Eigen::VectorXd& zeta) const override;
  double log_joint_grad(const Eigen::VectorXd& zeta, Eigen::VectorXd& grad) const override;
  Eigen::VectorXd to_constrained(const Eigen::VectorXd& zeta) const override;
  Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& theta) const override;
  double log_abs_det_jacobian(const Eigen::VectorXd& zeta) const override;
  double log_density_constrained(const Eigen::VectorXd& theta) const override;
  std::optional<Eigen::Index> quantity_coordinate(Eigen::Index i) const override;
  Eigen::VectorXd sample_prior(Rng& rng) const override;
  std::unique_ptr<Model> simulate(const Eigen::VectorXd& theta, Rng& rng) const override;
  void write_data_csv(std::ostream& out) const override;

  Parametrization parametrization() const { return param_; }
  const Eigen::VectorXd& y() const { return y_; }
  const Eigen::VectorXd& sigma() const { return sigma_; }

  static constexpr double kMuPriorSd = 5.0;
  static constexpr double kTauPriorScale = 5.0;

 private:
  Parametrization param_;
  Eigen::VectorXd y_;
  Eigen::VectorXd sigma_;
};

std::unique_ptr<EightSchools> eight_schools(Parametrization p);

// --- Regularized horseshoe ------------------------------------------------------

/// Logistic regression with intercept and a regularized horseshoe prior:
/// beta_j = z_j tau lambda_tilde_j, lambda_tilde_j^2 = c^2 lambda_j^2 /
/// (c^2 + tau^2 lambda_j^2), z_j ~ N(0,1), lambda_j ~ C+(0,1), tau ~
/// C+(0, tau0), c = slab_scale sqrt(caux), caux ~ Inv-Gamma(slab_df/2,
/// slab_df/2), beta0 ~ N(0, scale_icept). With slab_scale 2 and slab_df 4,
/// c^2 ~ Inv-Gamma(2, 8).
///
/// Unconstrained coordinates: (beta0, z_1..z_D, log_lambda_1..log_lambda_D,
/// log_tau, log_caux).
class RegularizedHorseshoe final : public Model {
 public:
  struct Settings {
    double tau0 = 0.0;  ///< <= 0 selects 2 / (sqrt(n) (D - 1))
    double scale_icept = 10.0;
    double slab_scale = 2.0;
    double slab_df = 4.0;
  };

  RegularizedHorseshoe(RegressionData data, Settings settings);

  static double default_tau0(Eigen::Index n, Eigen::Index d);

  std::string name() const override { return "horseshoe_logistic"; }
  Eigen::Index dim() const override { return 2 * d_ + 3; }
  std::vector<std::string> param_names() const override;
  std::vector<std::string> quantity_names() const override;
  double log_joint(const Eigen::VectorXd& zeta) const override;
  double log_joint_grad(const Eigen::VectorXd& zeta, Eigen::VectorXd& grad) const override;
  Eigen::VectorXd to_constrained(const Eigen::VectorXd& zeta) const override;
  Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& theta) const override;
  double log_abs_det_jacobian(const Eigen::VectorXd& zeta) const override;
  std::optional<Eigen::Index> quantity_coordinate(Eigen::Index i) const override { return i; }
  Eigen::VectorXd sample_prior(Rng& rng) const override;
  std::unique_ptr<Model> simulate(const Eigen::VectorXd& theta, Rng& rng) const override;
  void write_data_csv(std::ostream& out) const override;

  /// Regression coefficients implied by an unconstrained vector.
  Eigen::VectorXd coefficients(const Eigen::VectorXd& zeta) const;
  double tau0() const { return settings_.tau0; }
  Eigen::Index num_predictors() const { return d_; }
  const RegressionData& data() const { return data_; }

 private:
  double evaluate(const Eigen::VectorXd& zeta, Eigen::VectorXd* grad) const;

  RegressionData data_;
  Settings settings_;
  Eigen::Index n_;
  Eigen::Index d_;
};

/// Sparse synthetic problem: standardized N(0,1) design, the first
/// `active` coefficients set to +-3 alternating, the rest zero, intercept 0.
std::unique_ptr<RegularizedHorseshoe> regularized_horseshoe_logistic(Eigen::Index n, Eigen::Index d, Rng& rng,
                                                                     Eigen::Index active = 3,
                                                                     double tau0 = 0.0);

}  // namespace vidiag

#endif
