#include "vidiag/models.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "vidiag/csv.hpp"
#include "vidiag/error.hpp"

namespace vidiag {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_log_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - kLogSqrtTwoPi;
}

double MeanFieldGaussian::log_density(const Eigen::VectorXd& x) const {
  double lp = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double z = (x[i] - mu[i]) * std::exp(-omega[i]);
    lp += -0.5 * z * z - omega[i] - kLogSqrtTwoPi;
  }
  return lp;
}

double MeanFieldGaussian::entropy() const {
  return omega.sum() + static_cast<double>(dim()) * (0.5 + kLogSqrtTwoPi);
}

double Model::log_density_constrained(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd zeta = to_unconstrained(theta);
  return log_joint(zeta) - log_abs_det_jacobian(zeta);
}

Eigen::Index resolve_quantity(const Model& model, std::string_view name) {
  const auto names = model.quantity_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<Eigen::Index>(i);
  }
  if (name.substr(0, 4) == "log_") {
    const std::string_view stripped = name.substr(4);
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == stripped) return static_cast<Eigen::Index>(i);
    }
  }
  throw InvalidParameter("model " + model.name() + " has no quantity named '" + std::string(name) + "'");
}

void write_regression_csv(std::ostream& out, const RegressionData& data) {
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < data.x.cols(); ++j) header.push_back("x_" + std::to_string(j + 1));
  header.emplace_back("y");
  write_csv_header(out, header);
  std::vector<double> row(static_cast<std::size_t>(data.x.cols() + 1));
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.x.cols(); ++j) row[static_cast<std::size_t>(j)] = data.x(i, j);
    row.back() = data.y[i];
    write_csv_row(out, row);
  }
}

RegressionData read_regression_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  const long y_col = table.column("y");
  if (y_col < 0) throw InputError("regression data needs a 'y' column", 1);
  std::vector<long> x_cols;
  for (std::size_t j = 1;; ++j) {
    const long c = table.column("x_" + std::to_string(j));
    if (c < 0) break;
    x_cols.push_back(c);
  }
  if (x_cols.empty()) throw InputError("regression data needs x_1..x_K columns", 1);
  RegressionData data;
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  data.x.resize(n, static_cast<Eigen::Index>(x_cols.size()));
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < x_cols.size(); ++j) {
      data.x(i, static_cast<Eigen::Index>(j)) = row[static_cast<std::size_t>(x_cols[j])];
    }
    data.y[i] = row[static_cast<std::size_t>(y_col)];
  }
  return data;
}

Eigen::MatrixXd correlated_design(Eigen::Index n, Eigen::Index k, double rho, Rng& rng) {
  if (!(rho >= 0.0 && rho < 1.0)) throw InvalidParameter("design correlation must lie in [0, 1)");
  Eigen::MatrixXd x(n, k);
  const double own = std::sqrt(1.0 - rho);
  const double shared = std::sqrt(rho);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double common = standard_normal(rng);
    for (Eigen::Index j = 0; j < k; ++j) x(i, j) = own * standard_normal(rng) + shared * common;
  }
  return x;
}

// --- AnalyticGaussian ------------------------------------------------------------

AnalyticGaussian::AnalyticGaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
    throw InvalidParameter("analytic Gaussian covariance shape does not match mean");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov_);
  if (llt.info() != Eigen::Success) throw InvalidParameter("analytic Gaussian covariance is not positive definite");
  chol_ = llt.matrixL();
  precision_ = llt.solve(Eigen::MatrixXd::Identity(mean_.size(), mean_.size()));
  log_norm_ = -static_cast<double>(mean_.size()) * kLogSqrtTwoPi - chol_.diagonal().array().log().sum();
}

std::unique_ptr<AnalyticGaussian> analytic_gaussian(const Eigen::VectorXd& mean, const Eigen::VectorXd& sd) {
  if ((sd.array() <= 0.0).any()) throw InvalidParameter("analytic Gaussian sd must be positive");
  return std::make_unique<AnalyticGaussian>(mean, sd.array().square().matrix().asDiagonal().toDenseMatrix());
}

std::vector<std::string> AnalyticGaussian::param_names() const {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < mean_.size(); ++i) names.push_back("x_" + std::to_string(i + 1));
  return names;
}

double AnalyticGaussian::log_joint(const Eigen::VectorXd& zeta) const {
  const Eigen::VectorXd d = zeta - mean_;
  return log_norm_ - 0.5 * d.dot(precision_ * d);
}

double AnalyticGaussian::log_joint_grad(const Eigen::VectorXd& zeta, Eigen::VectorXd& grad) const {
  const Eigen::VectorXd d = zeta - mean_;
  grad = -(precision_ * d);
  return log_norm_ + 0.5 * d.dot(grad);
}

Eigen::VectorXd AnalyticGaussian::sample_prior(Rng& rng) const {
  return mean_ + chol_ * standard_normal_vector(rng, mean_.size());
}

std::unique_ptr<Model> AnalyticGaussian::simulate(const Eigen::VectorXd&, Rng&) const {
  return std::make_unique<AnalyticGaussian>(*this);
}

std::optional<MeanFieldGaussian> AnalyticGaussian::exact_posterior() const {
  const Eigen::MatrixXd off = cov_ - Eigen::MatrixXd(cov_.diagonal().asDiagonal());
  if (off.cwiseAbs().maxCoeff() > 0.0) return std::nullopt;
  return MeanFieldGaussian(mean_, cov_.diagonal().array().sqrt().log().matrix());
}

void AnalyticGaussian::write_data_csv(std::ostream& out) const {
  std::vector<std::string> header{"coordinate", "mean"};
  for (Eigen::Index j = 0; j < mean_.size(); ++j) header.push_back("cov_" + std::to_string(j + 1));
  write_csv_header(out, header);
  for (Eigen::Index i = 0; i < mean_.size(); ++i) {
    std::vector<double> row{static_cast<double>(i + 1), mean_[i]};
    for (Eigen::Index j = 0; j < mean_.size(); ++j) row.push_back(cov_(i, j));
    write_csv_row(out, row);
  }
}

double AnalyticGaussian::marginal_log_density(Eigen::Index i, double x) const {
  return normal_log_pdf(x, mean_[i], std::sqrt(cov_(i, i)));
}

// --- ConjugateNormal --------------------------------------------------------------

ConjugateNormal::ConjugateNormal(Eigen::MatrixXd observations, double prior_sd, double noise_sd)
    : obs_(std::move(observations)), prior_sd_(prior_sd), noise_sd_(noise_sd) {
  if (!(prior_sd_ > 0.0) || !(noise_sd_ > 0.0)) throw InvalidParameter("conjugate normal scales must be positive");
  if (obs_.rows() < 1 || obs_.cols() < 1) throw InvalidParameter("conjugate normal needs observations");
  sum_y_ = obs_.rowwise().sum();
  sum_y2_ = obs_.array().square().rowwise().sum();
}

std::unique_ptr<ConjugateNormal> ConjugateNormal::synthetic(Eigen::Index k, Eigen::Index n, double prior_sd,
                                                            double noise_sd, Rng& rng) {
  Eigen::MatrixXd obs(k, n);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double theta = prior_sd * standard_normal(rng);
    for (Eigen::Index j = 0; j < n; ++j) obs(i, j) = theta + noise_sd * standard_normal(rng);
  }
  return std::make_unique<ConjugateNormal>(std::move(obs), prior_sd, noise_sd);
}

std::vector<std::string> ConjugateNormal::param_names() const {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < obs_.rows(); ++i) names.push_back("theta_" + std::to_string(i + 1));
  return names;
}

double ConjugateNormal::log_joint(const Eigen::VectorXd& zeta) const {
  Eigen::VectorXd grad;
  return log_joint_grad(zeta, grad);
}

double ConjugateNormal::log_joint_grad(const Eigen::VectorXd& zeta, Eigen::VectorXd& grad) const {
  const double n = static_cast<double>(obs_.cols());
  const double s2 = noise_sd_ * noise_sd_;
  const double p2 = prior_sd_ * prior_sd_;
  grad.resize(zeta.size());
  double lp = 0.0;
  for (Eigen::Index i = 0; i < zeta.size(); ++i) {
    const double t = zeta[i];
    lp += normal_log_pdf(t, 0.0, prior_sd_);
    lp += -n * (std::log(noise_sd_) + kLogSqrtTwoPi) - (sum_y2_[i] - 2.0 * t * sum_y_[i] + n * t * t) / (2.0 * s2);
    grad[i] = -t / p2 + (sum_y_[i] - n * t) / s2;
  }
  return lp;
}

Eigen::VectorXd ConjugateNormal::sample_prior(Rng& rng) const {
  return prior_sd_ * standard_normal_vector(rng, obs_.rows());
}

std::unique_ptr<Model> ConjugateNormal::simulate(const Eigen::VectorXd& theta, Rng& rng) const {
  Eigen::MatrixXd obs(obs_.rows(), obs_.cols());
  for (Eigen::Index i = 0; i < obs.rows(); ++i) {
    for (Eigen::Index j = 0; j < obs.cols(); ++j) obs(i, j) = theta[i] + noise_sd_ * standard_normal(rng);
  }
  return std::make_unique<ConjugateNormal>(std::move(obs), prior_sd_, noise_sd_);
}

std::optional<MeanFieldGaussian> ConjugateNormal::exact_posterior() const {
  const double n = static_cast<double>(obs_.cols());
  const double precision = 1.0 / (prior_sd_ * prior_sd_) + n / (noise_sd_ * noise_sd_);
  const Eigen::VectorXd mean = (sum_y_ / (noise_sd_ * noise_sd_)) / precision;
  const Eigen::VectorXd log_sd = Eigen::VectorXd::Constant(obs_.rows(), -0.5 * std::log(precision));
  return MeanFieldGaussian(mean, log_sd);
}

void ConjugateNormal::write_data_csv(std::ostream& out) const {
  write_csv_header(out, {"coordinate", "y"});
  for (Eigen::Index i = 0; i < obs_.rows(); ++i) {
    for (Eigen::Index j = 0; j < obs_.cols(); ++j) write_csv_row(out, {static_cast<double>(i + 1), obs_(i, j)});
  }
}

}  // namespace vidiag
