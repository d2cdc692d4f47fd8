#include "vidiag_cli/registry.hpp"

#include <fstream>
#include <set>

#include "vidiag/error.hpp"
#include "vidiag/random.hpp"

namespace vidiag::cli {

namespace {

// Reads typed options with defaults and rejects keys nobody asked for.
class Options {
 public:
  explicit Options(const nlohmann::json& j) : j_(j) {}

  template <typename T>
  T get(const std::string& key, T fallback) {
    used_.insert(key);
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw InvalidParameter("model option '" + key + "' has the wrong type");
    }
  }

  Eigen::VectorXd vector(const std::string& key, Eigen::Index n, double fill) {
    const auto values = get<std::vector<double>>(key, std::vector<double>(static_cast<std::size_t>(n), fill));
    if (static_cast<Eigen::Index>(values.size()) != n) {
      throw InvalidParameter("model option '" + key + "' needs " + std::to_string(n) + " entries");
    }
    return Eigen::Map<const Eigen::VectorXd>(values.data(), n);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) throw InvalidParameter("unknown model option '" + key + "'");
    }
  }

 private:
  const nlohmann::json& j_;
  std::set<std::string> used_;
};

Eigen::Index positive(long v, const char* what) {
  if (v < 1) throw InvalidParameter(std::string(what) + " must be positive");
  return static_cast<Eigen::Index>(v);
}

RegressionData load_data(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open data file: " + path.string());
  return read_regression_csv(in);
}

}  // namespace

std::vector<std::string> model_names() {
  return {"analytic-gaussian", "conjugate-normal",         "linear-regression", "logistic-regression",
          "eight-schools-centered", "eight-schools-noncentered", "horseshoe"};
}

std::unique_ptr<Model> make_model(const RunConfig& cfg) {
  Options opt(cfg.model_options);
  Rng rng = make_rng(stream_seed(cfg, kDataStream), 0);
  std::unique_ptr<Model> model;
  const std::string& name = cfg.model;

  if (name == "analytic-gaussian") {
    const Eigen::Index k = positive(opt.get<long>("k", 1), "k");
    model = analytic_gaussian(opt.vector("mean", k, 0.0), opt.vector("sd", k, 1.0));
  } else if (name == "conjugate-normal") {
    const Eigen::Index k = positive(opt.get<long>("k", 2), "k");
    const Eigen::Index n = positive(opt.get<long>("n", 10), "n");
    model = ConjugateNormal::synthetic(k, n, opt.get<double>("prior_sd", 1.0), opt.get<double>("noise_sd", 1.0), rng);
  } else if (name == "linear-regression") {
    const double prior_sd = opt.get<double>("prior_sd", 1.0);
    if (cfg.data) {
      model = std::make_unique<LinearRegression>(load_data(*cfg.data), prior_sd);
    } else {
      const Eigen::Index n = positive(opt.get<long>("n", 500), "n");
      const Eigen::Index k = positive(opt.get<long>("k", 5), "k");
      const Eigen::VectorXd beta = cfg.model_options.contains("beta") ? opt.vector("beta", k, 0.0)
                                                                       : standard_normal_vector(rng, k);
      const auto synthetic = linear_regression(n, k, beta, opt.get<double>("sigma", 1.0), rng);
      model = std::make_unique<LinearRegression>(synthetic->data(), prior_sd);
    }
  } else if (name == "logistic-regression") {
    // VSBC draws truths from the prior, so it needs a proper one.
    const double prior_sd = opt.get<double>("prior_sd", cfg.command == "vsbc" ? LogisticRegression::kReplicationPriorSd : 0.0);
    if (cfg.data) {
      model = std::make_unique<LogisticRegression>(load_data(*cfg.data), prior_sd);
    } else {
      const Eigen::Index n = positive(opt.get<long>("n", 100), "n");
      const Eigen::Index k = positive(opt.get<long>("k", 2), "k");
      const double rho = opt.get<double>("rho", 0.0);
      if (!(rho >= 0.0 && rho < 1.0)) throw InvalidParameter("rho must lie in [0, 1)");
      model = logistic_regression(n, k, rho, opt.vector("beta", k, 1.0), rng, prior_sd);
    }
  } else if (name == "eight-schools-centered" || name == "eight-schools-noncentered") {
    model = eight_schools(name == "eight-schools-centered" ? Parametrization::Centered : Parametrization::NonCentered);
  } else if (name == "horseshoe") {
    const Eigen::Index n = positive(opt.get<long>("n", 70), "n");
    const Eigen::Index d = positive(opt.get<long>("d", 100), "d");
    const Eigen::Index active = opt.get<long>("active", 3);
    const double tau0 = opt.get<double>("tau0", 0.0);
    if (cfg.data) {
      RegularizedHorseshoe::Settings s;
      s.tau0 = tau0;
      model = std::make_unique<RegularizedHorseshoe>(load_data(*cfg.data), s);
    } else {
      model = regularized_horseshoe_logistic(n, d, rng, active, tau0);
    }
  } else if (name.empty()) {
    throw InvalidParameter("no model given (--model)");
  } else {
    std::string known;
    for (const auto& m : model_names()) known += (known.empty() ? "" : ", ") + m;
    throw InvalidParameter("unknown model '" + name + "'; known models: " + known);
  }
  opt.finish();
  return model;
}

}  // namespace vidiag::cli
