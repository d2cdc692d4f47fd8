#include <cmath>
#include <numbers>
#include <ostream>

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

}  // namespace

RegularizedHorseshoe::RegularizedHorseshoe(RegressionData data, Settings settings)
    : data_(std::move(data)), settings_(settings), n_(data_.x.rows()), d_(data_.x.cols()) {
  if (n_ < 1 || d_ < 2) throw InvalidParameter("horseshoe regression needs n >= 1 and D >= 2");
  if (data_.y.size() != n_) throw InvalidParameter("response length does not match design rows");
  if (settings_.tau0 <= 0.0) settings_.tau0 = default_tau0(n_, d_);
  if (!(settings_.scale_icept > 0.0) || !(settings_.slab_scale > 0.0) || !(settings_.slab_df > 0.0)) {
    throw InvalidParameter("horseshoe scales must be positive");
  }
}

double RegularizedHorseshoe::default_tau0(Eigen::Index n, Eigen::Index d) {
  return 2.0 / (std::sqrt(static_cast<double>(n)) * static_cast<double>(d - 1));
}

std::vector<std::string> RegularizedHorseshoe::param_names() const {
  std::vector<std::string> names{"beta0"};
  for (Eigen::Index j = 0; j < d_; ++j) names.push_back("z_" + std::to_string(j + 1));
  for (Eigen::Index j = 0; j < d_; ++j) names.push_back("log_lambda_" + std::to_string(j + 1));
  names.emplace_back("log_tau");
  names.emplace_back("log_caux");
  return names;
}

std::vector<std::string> RegularizedHorseshoe::quantity_names() const {
  std::vector<std::string> names{"beta0"};
  for (Eigen::Index j = 0; j < d_; ++j) names.push_back("z_" + std::to_string(j + 1));
  for (Eigen::Index j = 0; j < d_; ++j) names.push_back("lambda_" + std::to_string(j + 1));
  names.emplace_back("tau");
  names.emplace_back("caux");
  return names;
}

Eigen::VectorXd RegularizedHorseshoe::coefficients(const Eigen::VectorXd& zeta) const {
  const double tau = std::exp(zeta[2 * d_ + 1]);
  const double c2 = settings_.slab_scale * settings_.slab_scale * std::exp(zeta[2 * d_ + 2]);
  Eigen::VectorXd beta(d_);
  for (Eigen::Index j = 0; j < d_; ++j) {
    const double lambda2 = std::exp(2.0 * zeta[1 + d_ + j]);
    const double lambda_tilde = std::sqrt(c2 * lambda2 / (c2 + tau * tau * lambda2));
    beta[j] = zeta[1 + j] * tau * lambda_tilde;
  }
  return beta;
}

double RegularizedHorseshoe::evaluate(const Eigen::VectorXd& zeta, Eigen::VectorXd* grad) const {
  const double beta0 = zeta[0];
  const double log_tau = zeta[2 * d_ + 1];
  const double log_caux = zeta[2 * d_ + 2];
  const double tau = std::exp(log_tau);
  const double caux = std::exp(log_caux);
  const double c2 = settings_.slab_scale * settings_.slab_scale * caux;
  const double tau0 = settings_.tau0;
  const double a = 0.5 * settings_.slab_df;
  const double b = 0.5 * settings_.slab_df;

  Eigen::VectorXd beta(d_);
  Eigen::VectorXd lambda_tilde(d_);
  Eigen::VectorXd shrink(d_);  // c^2 / (c^2 + tau^2 lambda^2)
  double lp = 0.0;
  for (Eigen::Index j = 0; j < d_; ++j) {
    const double z = zeta[1 + j];
    const double log_lambda = zeta[1 + d_ + j];
    const double lambda2 = std::exp(2.0 * log_lambda);
    const double denom = c2 + tau * tau * lambda2;
    shrink[j] = c2 / denom;
    lambda_tilde[j] = std::sqrt(c2 * lambda2 / denom);
    beta[j] = z * tau * lambda_tilde[j];
    lp += -0.5 * z * z - kLogSqrtTwoPi;
    lp += std::log(2.0 / std::numbers::pi) - std::log1p(lambda2) + log_lambda;
  }
  const double r = tau / tau0;
  lp += std::log(2.0 / (std::numbers::pi * tau0)) - std::log1p(r * r) + log_tau;
  lp += a * std::log(b) - std::lgamma(a) - (a + 1.0) * log_caux - b / caux + log_caux;
  lp += normal_log_pdf(beta0, 0.0, settings_.scale_icept);

  const Eigen::VectorXd f = (data_.x * beta).array() + beta0;
  Eigen::VectorXd resid(n_);
  for (Eigen::Index i = 0; i < n_; ++i) {
    lp += data_.y[i] * f[i] - softplus(f[i]);
    resid[i] = data_.y[i] - sigmoid(f[i]);
  }

  if (grad) {
    grad->resize(dim());
    const Eigen::VectorXd g_beta = data_.x.transpose() * resid;
    (*grad)[0] = resid.sum() - beta0 / (settings_.scale_icept * settings_.scale_icept);
    double d_log_tau = -2.0 * r * r / (1.0 + r * r) + 1.0;
    double d_log_caux = -a + b / caux;
    for (Eigen::Index j = 0; j < d_; ++j) {
      const double z = zeta[1 + j];
      const double lambda2 = std::exp(2.0 * zeta[1 + d_ + j]);
      const double gb = g_beta[j] * beta[j];
      (*grad)[1 + j] = g_beta[j] * tau * lambda_tilde[j] - z;
      (*grad)[1 + d_ + j] = gb * shrink[j] - 2.0 * lambda2 / (1.0 + lambda2) + 1.0;
      d_log_tau += gb * shrink[j];
      d_log_caux += 0.5 * gb * (1.0 - shrink[j]);
    }
    (*grad)[2 * d_ + 1] = d_log_tau;
    (*grad)[2 * d_ + 2] = d_log_caux;
  }
  return lp;
}

double RegularizedHorseshoe::log_joint(const Eigen::VectorXd& zeta) const { return evaluate(zeta, nullptr); }

double RegularizedHorseshoe::log_joint_grad(const Eigen::VectorXd& zeta, Eigen::VectorXd& grad) const {
  return evaluate(zeta, &grad);
}

Eigen::VectorXd RegularizedHorseshoe::to_constrained(const Eigen::VectorXd& zeta) const {
  Eigen::VectorXd theta = zeta;
  theta.segment(1 + d_, d_ + 2) = zeta.segment(1 + d_, d_ + 2).array().exp();
  return theta;
}

Eigen::VectorXd RegularizedHorseshoe::to_unconstrained(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd zeta = theta;
  zeta.segment(1 + d_, d_ + 2) = theta.segment(1 + d_, d_ + 2).array().log();
  return zeta;
}

double RegularizedHorseshoe::log_abs_det_jacobian(const Eigen::VectorXd& zeta) const {
  return zeta.segment(1 + d_, d_ + 2).sum();
}

Eigen::VectorXd RegularizedHorseshoe::sample_prior(Rng& rng) const {
  Eigen::VectorXd theta(dim());
  std::cauchy_distribution<double> cauchy(0.0, 1.0);
  auto positive_cauchy = [&](double scale) {
    double v = 0.0;
    while (!(v > 0.0) || !std::isfinite(v)) v = std::abs(scale * cauchy(rng));
    return v;
  };
  theta[0] = settings_.scale_icept * standard_normal(rng);
  for (Eigen::Index j = 0; j < d_; ++j) theta[1 + j] = standard_normal(rng);
  for (Eigen::Index j = 0; j < d_; ++j) theta[1 + d_ + j] = positive_cauchy(1.0);
  theta[2 * d_ + 1] = positive_cauchy(settings_.tau0);
  std::gamma_distribution<double> gamma(0.5 * settings_.slab_df, 1.0 / (0.5 * settings_.slab_df));
  theta[2 * d_ + 2] = 1.0 / gamma(rng);
  return theta;
}

std::unique_ptr<Model> RegularizedHorseshoe::simulate(const Eigen::VectorXd& theta, Rng& rng) const {
  const Eigen::VectorXd zeta = to_unconstrained(theta);
  const Eigen::VectorXd beta = coefficients(zeta);
  const Eigen::VectorXd f = (data_.x * beta).array() + theta[0];
  RegressionData d{data_.x, Eigen::VectorXd(n_)};
  for (Eigen::Index i = 0; i < n_; ++i) d.y[i] = uniform_open(rng) < sigmoid(f[i]) ? 1.0 : 0.0;
  return std::make_unique<RegularizedHorseshoe>(std::move(d), settings_);
}

void RegularizedHorseshoe::write_data_csv(std::ostream& out) const { write_regression_csv(out, data_); }

std::unique_ptr<RegularizedHorseshoe> regularized_horseshoe_logistic(Eigen::Index n, Eigen::Index d, Rng& rng,
                                                                     Eigen::Index active, double tau0) {
  if (active > d) throw InvalidParameter("more active coefficients than predictors");
  RegressionData data;
  data.x.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) data.x(i, j) = standard_normal(rng);
  }
  // Standardize columns, as is done for the microarray design.
  for (Eigen::Index j = 0; j < d; ++j) {
    const double mean = data.x.col(j).mean();
    data.x.col(j).array() -= mean;
    const double sd = std::sqrt(data.x.col(j).squaredNorm() / static_cast<double>(std::max<Eigen::Index>(n - 1, 1)));
    if (sd > 0.0) data.x.col(j) /= sd;
  }
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  for (Eigen::Index j = 0; j < active; ++j) beta[j] = (j % 2 == 0) ? 3.0 : -3.0;
  data.y = simulate_logistic_response(data.x, beta, rng);
  RegularizedHorseshoe::Settings settings;
  settings.tau0 = tau0;
  return std::make_unique<RegularizedHorseshoe>(std::move(data), settings);
}

}  // namespace vidiag
