#include <cmath>
#include <numbers>
#include <ostream>

#include "vidiag/csv.hpp"
#include "vidiag/error.hpp"
#include "vidiag/models.hpp"

namespace vidiag {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double half_cauchy_log_pdf(double x, double scale) {
  const double r = x / scale;
  return std::log(2.0 / (std::numbers::pi * scale)) - std::log1p(r * r);
}

double half_cauchy_sample(Rng& rng, double scale) {
  std::cauchy_distribution<double> dist(0.0, scale);
  return std::abs(dist(rng));
}

}  // namespace

// --- LinearRegression ---------------------------------------------------------------

LinearRegression::LinearRegression(RegressionData data, double prior_sd, double sigma_shape, double sigma_rate)
    : data_(std::move(data)),
      n_(data_.x.rows()),
      k_(data_.x.cols()),
      prior_sd_(prior_sd),
      shape_(sigma_shape),
      rate_(sigma_rate) {
  if (n_ < 1 || k_ < 1) throw InvalidParameter("linear regression needs n, K >= 1");
  if (data_.y.size() != n_) throw InvalidParameter("response length does not match design rows");
  if (!(prior_sd_ > 0.0) || !(shape_ > 0.0) || !(rate_ > 0.0)) {
    throw InvalidParameter("linear regression prior scales must be positive");
  }
  xtx_ = data_.x.transpose() * data_.x;
  xty_ = data_.x.transpose() * data_.y;
  yty_ = data_.y.squaredNorm();
}

std::vector<std::string> LinearRegression::param_names() const {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < k_; ++i) names.push_back("beta_" + std::to_string(i + 1));
  names.emplace_back("log_sigma");
  return names;
}

std::vector<std::string> LinearRegression::quantity_names() const {
  auto names = param_names();
  names.back() = "sigma";
  return names;
}

double LinearRegression::log_prior_and_lik(const Eigen::VectorXd& beta, double log_sigma,
                                           Eigen::VectorXd* grad) const {
  const Eigen::VectorXd xtx_beta = xtx_ * beta;
  const double rss = std::max(0.0, yty_ - 2.0 * beta.dot(xty_) + beta.dot(xtx_beta));
  const double n = static_cast<double>(n_);
  const double inv_var = std::exp(-2.0 * log_sigma);
  const double sigma = std::exp(log_sigma);
  const double p2 = prior_sd_ * prior_sd_;

  double lp = -n * (log_sigma + kLogSqrtTwoPi) - 0.5 * rss * inv_var;
  lp += -0.5 * beta.squaredNorm() / p2 - static_cast<double>(k_) * (std::log(prior_sd_) + kLogSqrtTwoPi);
  lp += shape_ * std::log(rate_) - std::lgamma(shape_) + (shape_ - 1.0) * log_sigma - rate_ * sigma;

  if (grad) {
    grad->resize(k_ + 1);
    grad->head(k_) = (xty_ - xtx_beta) * inv_var - beta / p2;
    (*grad)[k_] = -n + rss * inv_var + (shape_ - 1.0) - rate_ * sigma;
  }
  return lp;
}

double LinearRegression::log_joint(const Eigen::VectorXd& zeta) const {
  return log_prior_and_lik(zeta.head(k_), zeta[k_], nullptr) + zeta[k_];
}

double LinearRegression::log_joint_grad(const Eigen::VectorXd& zeta, Eigen::VectorXd& grad) const {
  const double lp = log_prior_and_lik(zeta.head(k_), zeta[k_], &grad) + zeta[k_];
  grad[k_] += 1.0;
  return lp;
}

double LinearRegression::log_density_constrained(const Eigen::VectorXd& theta) const {
  const double sigma = theta[k_];
  if (!(sigma > 0.0)) return -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd beta = theta.head(k_);
  const Eigen::VectorXd resid = data_.y - data_.x * beta;
  double lp = 0.0;
  for (Eigen::Index i = 0; i < n_; ++i) lp += normal_log_pdf(resid[i], 0.0, sigma);
  for (Eigen::Index i = 0; i < k_; ++i) lp += normal_log_pdf(beta[i], 0.0, prior_sd_);
  lp += shape_ * std::log(rate_) - std::lgamma(shape_) + (shape_ - 1.0) * std::log(sigma) - rate_ * sigma;
  return lp;
}

Eigen::VectorXd LinearRegression::to_constrained(const Eigen::VectorXd& zeta) const {
  Eigen::VectorXd theta = zeta;
  theta[k_] = std::exp(zeta[k_]);
  return theta;
}

Eigen::VectorXd LinearRegression::to_unconstrained(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd zeta = theta;
  zeta[k_] = std::log(theta[k_]);
  return zeta;
}

Eigen::VectorXd LinearRegression::sample_prior(Rng& rng) const {
  Eigen::VectorXd theta(k_ + 1);
  theta.head(k_) = prior_sd_ * standard_normal_vector(rng, k_);
  std::gamma_distribution<double> gamma(shape_, 1.0 / rate_);
  double sigma = 0.0;
  // Gamma(0.5, .) can underflow to exactly zero; redraw so log(sigma) is finite.
  while (!(sigma > 0.0)) sigma = gamma(rng);
  theta[k_] = sigma;
  return theta;
}

std::unique_ptr<Model> LinearRegression::simulate(const Eigen::VectorXd& theta, Rng& rng) const {
  RegressionData d{data_.x, data_.x * theta.head(k_)};
  for (Eigen::Index i = 0; i < n_; ++i) d.y[i] += theta[k_] * standard_normal(rng);
  return std::make_unique<LinearRegression>(std::move(d), prior_sd_, shape_, rate_);
}

void LinearRegression::write_data_csv(std::ostream& out) const { write_regression_csv(out, data_); }

std::unique_ptr<LinearRegression> linear_regression(Eigen::Index n, Eigen::Index k, const Eigen::VectorXd& beta,
                                                    double sigma, Rng& rng) {
  if (beta.size() != k) throw InvalidParameter("coefficient vector length must equal K");
  RegressionData d;
  d.x.resize(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) d.x(i, j) = standard_normal(rng);
  }
  d.y = d.x * beta;
  for (Eigen::Index i = 0; i < n; ++i) d.y[i] += sigma * standard_normal(rng);
  return std::make_unique<LinearRegression>(std::move(d));
}

// --- LogisticRegression ----------------------------------------------------------------

LogisticRegression::LogisticRegression(RegressionData data, double prior_sd)
    : data_(std::move(data)), prior_sd_(prior_sd) {
  if (data_.x.rows() < 1 || data_.x.cols() < 1) throw InvalidParameter("logistic regression needs n, K >= 1");
  if (data_.y.size() != data_.x.rows()) throw InvalidParameter("response length does not match design rows");
  if (prior_sd_ < 0.0) throw InvalidParameter("prior sd must be non-negative (0 = flat)");
  for (Eigen::Index i = 0; i < data_.y.size(); ++i) {
    if (data_.y[i] != 0.0 && data_.y[i] != 1.0) throw InvalidParameter("logistic responses must be 0 or 1");
  }
}

std::vector<std::string> LogisticRegression::param_names() const {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < data_.x.cols(); ++i) names.push_back("beta_" + std::to_string(i + 1));
  return names;
}

double LogisticRegression::log_joint(const Eigen::VectorXd& zeta) const {
  const Eigen::VectorXd eta = data_.x * zeta;
  double lp = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) lp += data_.y[i] * eta[i] - softplus(eta[i]);
  if (prior_sd_ > 0.0) {
    for (Eigen::Index j = 0; j < zeta.size(); ++j) lp += normal_log_pdf(zeta[j], 0.0, prior_sd_);
  }
  return lp;
}

double LogisticRegression::log_joint_grad(const Eigen::VectorXd& zeta, Eigen::VectorXd& grad) const {
  const Eigen::VectorXd eta = data_.x * zeta;
  Eigen::VectorXd resid(eta.size());
  double lp = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    lp += data_.y[i] * eta[i] - softplus(eta[i]);
    resid[i] = data_.y[i] - sigmoid(eta[i]);
  }
  grad = data_.x.transpose() * resid;
  if (prior_sd_ > 0.0) {
    for (Eigen::Index j = 0; j < zeta.size(); ++j) lp += normal_log_pdf(zeta[j], 0.0, prior_sd_);
    grad -= zeta / (prior_sd_ * prior_sd_);
  }
  return lp;
}

Eigen::VectorXd LogisticRegression::sample_prior(Rng& rng) const {
  const double sd = prior_sd_ > 0.0 ? prior_sd_ : kReplicationPriorSd;
  return sd * standard_normal_vector(rng, data_.x.cols());
}

std::unique_ptr<Model> LogisticRegression::simulate(const Eigen::VectorXd& theta, Rng& rng) const {
  RegressionData d{data_.x, simulate_logistic_response(data_.x, theta, rng)};
  return std::make_unique<LogisticRegression>(std::move(d), prior_sd_);
}

void LogisticRegression::write_data_csv(std::ostream& out) const { write_regression_csv(out, data_); }

Eigen::VectorXd simulate_logistic_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta, Rng& rng) {
  const Eigen::VectorXd eta = x * beta;
  Eigen::VectorXd y(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) y[i] = uniform_open(rng) < sigmoid(eta[i]) ? 1.0 : 0.0;
  return y;
}

std::unique_ptr<LogisticRegression> logistic_regression(Eigen::Index n, Eigen::Index k, double rho,
                                                        const Eigen::VectorXd& beta, Rng& rng, double prior_sd) {
  if (beta.size() != k) throw InvalidParameter("coefficient vector length must equal K");
  RegressionData d;
  d.x = correlated_design(n, k, rho, rng);
  d.y = simulate_logistic_response(d.x, beta, rng);
  return std::make_unique<LogisticRegression>(std::move(d), prior_sd);
}

double logistic_log_predictive_density(const Eigen::MatrixXd& draws, const Eigen::VectorXd& weights,
                                       const RegressionData& test) {
  const Eigen::Index s_count = draws.rows();
  if (weights.size() != 0 && weights.size() != s_count) {
    throw InvalidParameter("weight count does not match draw count");
  }
  Eigen::VectorXd log_w(s_count);
  for (Eigen::Index s = 0; s < s_count; ++s) {
    log_w[s] = weights.size() == 0 ? 0.0 : std::log(weights[s]);
  }
  const double log_w_max = log_w.maxCoeff();
  const double log_w_total = log_w_max + std::log((log_w.array() - log_w_max).exp().sum());

  const Eigen::MatrixXd eta = draws * test.x.transpose();  // S x n_test
  double total = 0.0;
  for (Eigen::Index i = 0; i < test.x.rows(); ++i) {
    double m = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd terms(s_count);
    for (Eigen::Index s = 0; s < s_count; ++s) {
      const double e = eta(s, i);
      terms[s] = log_w[s] + test.y[i] * e - softplus(e);
      m = std::max(m, terms[s]);
    }
    total += m + std::log((terms.array() - m).exp().sum()) - log_w_total;
  }
  return total / static_cast<double>(test.x.rows());
}

// --- EightSchools ------------------------------------------------------------------------

EightSchools::EightSchools(Parametrization p, Eigen::VectorXd y, Eigen::VectorXd sigma)
    : param_(p), y_(std::move(y)), sigma_(std::move(sigma)) {
  if (y_.size() != sigma_.size() || y_.size() < 1) throw InvalidParameter("school effects and sds must match");
  if ((sigma_.array() <= 0.0).any()) throw InvalidParameter("school sds must be positive");
}

Eigen::VectorXd EightSchools::observed_effects() {
  Eigen::VectorXd y(8);
  y << 28, 8, -3, 7, -1, 1, 8, 12;
  return y;
}

Eigen::VectorXd EightSchools::observed_sd() {
  Eigen::VectorXd s(8);
  s << 15, 10, 16, 11, 9, 11, 10, 18;
  return s;
}

std::unique_ptr<EightSchools> eight_schools(Parametrization p) {
  return std::make_unique<EightSchools>(p, EightSchools::observed_effects(), EightSchools::observed_sd());
}

std::string EightSchools::name() const {
  return param_ == Parametrization::Centered ? "eight_schools_centered" : "eight_schools_noncentered";
}

std::vector<std::string> EightSchools::param_names() const {
  std::vector<std::string> names;
  const std::string prefix = param_ == Parametrization::Centered ? "theta_" : "theta_tilde_";
  for (Eigen::Index j = 0; j < y_.size(); ++j) names.push_back(prefix + std::to_string(j + 1));
  names.emplace_back("mu");
  names.emplace_back("log_tau");
  return names;
}

std::vector<std::string> EightSchools::quantity_names() const {
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < y_.size(); ++j) names.push_back("theta_" + std::to_string(j + 1));
  names.emplace_back("mu");
  names.emplace_back("tau");
  return names;
}

double EightSchools::log_joint(const Eigen::VectorXd& zeta) const {
  Eigen::VectorXd grad;
  return log_joint_grad(zeta, grad);
}

double EightSchools::log_joint_grad(const Eigen::VectorXd& zeta, Eigen::VectorXd& grad) const {
  const Eigen::Index j_count = y_.size();
  const double mu = zeta[j_count];
  const double log_tau = zeta[j_count + 1];
  const double tau = std::exp(log_tau);
  const double s2 = kTauPriorScale * kTauPriorScale;
  grad.resize(zeta.size());

  double lp = normal_log_pdf(mu, 0.0, kMuPriorSd) + half_cauchy_log_pdf(tau, kTauPriorScale) + log_tau;
  double d_mu = -mu / (kMuPriorSd * kMuPriorSd);
  double d_log_tau = -2.0 * tau * tau / (s2 + tau * tau) + 1.0;

  if (param_ == Parametrization::Centered) {
    const double inv_tau2 = std::exp(-2.0 * log_tau);
    for (Eigen::Index j = 0; j < j_count; ++j) {
      const double theta = zeta[j];
      const double dev = theta - mu;
      lp += normal_log_pdf(y_[j], theta, sigma_[j]);
      lp += -0.5 * dev * dev * inv_tau2 - log_tau - kLogSqrtTwoPi;
      grad[j] = (y_[j] - theta) / (sigma_[j] * sigma_[j]) - dev * inv_tau2;
      d_mu += dev * inv_tau2;
      d_log_tau += -1.0 + dev * dev * inv_tau2;
    }
  } else {
    for (Eigen::Index j = 0; j < j_count; ++j) {
      const double raw = zeta[j];
      const double theta = mu + tau * raw;
      const double r = (y_[j] - theta) / (sigma_[j] * sigma_[j]);
      lp += normal_log_pdf(y_[j], theta, sigma_[j]);
      lp += -0.5 * raw * raw - kLogSqrtTwoPi;
      grad[j] = r * tau - raw;
      d_mu += r;
      d_log_tau += r * tau * raw;
    }
  }
  grad[j_count] = d_mu;
  grad[j_count + 1] = d_log_tau;
  return lp;
}

Eigen::VectorXd EightSchools::to_constrained(const Eigen::VectorXd& zeta) const {
  const Eigen::Index j_count = y_.size();
  Eigen::VectorXd theta = zeta;
  const double tau = std::exp(zeta[j_count + 1]);
  theta[j_count + 1] = tau;
  if (param_ == Parametrization::NonCentered) {
    theta.head(j_count) = (zeta.head(j_count) * tau).array() + zeta[j_count];
  }
  return theta;
}

Eigen::VectorXd EightSchools::to_unconstrained(const Eigen::VectorXd& theta) const {
  const Eigen::Index j_count = y_.size();
  Eigen::VectorXd zeta = theta;
  const double tau = theta[j_count + 1];
  zeta[j_count + 1] = std::log(tau);
  if (param_ == Parametrization::NonCentered) {
    zeta.head(j_count) = (theta.head(j_count).array() - theta[j_count]) / tau;
  }
  return zeta;
}

double EightSchools::log_abs_det_jacobian(const Eigen::VectorXd& zeta) const {
  const Eigen::Index j_count = y_.size();
  const double log_tau = zeta[j_count + 1];
  return param_ == Parametrization::Centered ? log_tau : static_cast<double>(j_count + 1) * log_tau;
}

double EightSchools::log_density_constrained(const Eigen::VectorXd& theta) const {
  const Eigen::Index j_count = y_.size();
  const double mu = theta[j_count];
  const double tau = theta[j_count + 1];
  if (!(tau > 0.0)) return -std::numeric_limits<double>::infinity();
  double lp = normal_log_pdf(mu, 0.0, kMuPriorSd) + half_cauchy_log_pdf(tau, kTauPriorScale);
  for (Eigen::Index j = 0; j < j_count; ++j) {
    lp += normal_log_pdf(theta[j], mu, tau) + normal_log_pdf(y_[j], theta[j], sigma_[j]);
  }
  return lp;
}

std::optional<Eigen::Index> EightSchools::quantity_coordinate(Eigen::Index i) const {
  if (param_ == Parametrization::Centered || i >= y_.size()) return i;
  return std::nullopt;
}

Eigen::VectorXd EightSchools::sample_prior(Rng& rng) const {
  const Eigen::Index j_count = y_.size();
  Eigen::VectorXd theta(j_count + 2);
  const double mu = kMuPriorSd * standard_normal(rng);
  double tau = 0.0;
  while (!(tau > 0.0)) tau = half_cauchy_sample(rng, kTauPriorScale);
  for (Eigen::Index j = 0; j < j_count; ++j) theta[j] = mu + tau * standard_normal(rng);
  theta[j_count] = mu;
  theta[j_count + 1] = tau;
  return theta;
}

std::unique_ptr<Model> EightSchools::simulate(const Eigen::VectorXd& theta, Rng& rng) const {
  Eigen::VectorXd y(y_.size());
  for (Eigen::Index j = 0; j < y_.size(); ++j) y[j] = theta[j] + sigma_[j] * standard_normal(rng);
  return std::make_unique<EightSchools>(param_, std::move(y), sigma_);
}

void EightSchools::write_data_csv(std::ostream& out) const {
  write_csv_header(out, {"school", "y", "sigma"});
  for (Eigen::Index j = 0; j < y_.size(); ++j) write_csv_row(out, {static_cast<double>(j + 1), y_[j], sigma_[j]});
}

}  // namespace vidiag
