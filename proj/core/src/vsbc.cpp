#include "vidiag/vsbc.hpp"

#include <cmath>
#include <optional>

#include "vidiag/parallel.hpp"

namespace vidiag {

std::string_view to_string(Skew s) {
  switch (s) {
    case Skew::Symmetric:
      return "Symmetric";
    case Skew::RightSkewed:
      return "RightSkewed";
    case Skew::LeftSkewed:
      return "LeftSkewed";
  }
  return "Symmetric";
}

double calibration_prob_normal(double mu, double sd, double zeta0) {
  if (std::isinf(zeta0)) return zeta0 < 0.0 ? 1.0 : 0.0;
  return normal_cdf((mu - zeta0) / sd);
}

double calibration_prob(const MeanFieldGaussian& q, const Model& model, const Eigen::VectorXd& theta0,
                        Eigen::Index quantity, Rng* rng, std::size_t mc_draws) {
  if (const auto coord = model.quantity_coordinate(quantity)) {
    const Eigen::VectorXd zeta0 = model.to_unconstrained(theta0);
    return calibration_prob_normal(q.mu[*coord], std::exp(q.omega[*coord]), zeta0[*coord]);
  }
  if (!rng) throw InvalidParameter("non-monotone quantity needs a random stream for Monte Carlo calibration");
  std::size_t above = 0;
  for (std::size_t s = 0; s < mc_draws; ++s) {
    const Eigen::VectorXd theta = model.to_constrained(q.sample(*rng));
    if (theta0[quantity] < theta[quantity]) ++above;
  }
  return static_cast<double>(above) / static_cast<double>(mc_draws);
}

MarginResult symmetry_test(std::span<const double> p, double alpha, std::size_t n_bins) {
  std::vector<double> mirrored(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) mirrored[i] = 1.0 - p[i];
  MarginResult r;
  r.two_sided = ks_two_sample(p, mirrored, Alternative::TwoSided);
  r.less = ks_two_sample(p, mirrored, Alternative::Less);
  r.greater = ks_two_sample(p, mirrored, Alternative::Greater);
  if (r.two_sided.p_value >= alpha) {
    r.skew = Skew::Symmetric;
  } else if (r.less.p_value < alpha && r.less.statistic >= r.greater.statistic) {
    r.skew = Skew::RightSkewed;
  } else if (r.greater.p_value < alpha) {
    r.skew = Skew::LeftSkewed;
  } else {
    // The two-sided p-value bounds the larger one-sided one, so this only
    // triggers on exact ties of the statistics.
    r.skew = r.less.p_value < alpha ? Skew::RightSkewed : Skew::Symmetric;
  }
  r.histogram = histogram_bins(p, n_bins);
  return r;
}

VsbcReport vsbc_run(const Model& model, const VsbcConfig& config, std::uint64_t seed) {
  if (config.replications < 2) throw InvalidParameter("VSBC needs at least 2 replications");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw InvalidParameter("alpha must lie in (0, 1)");
  if (!config.oracle) config.vi.validate();
  if (config.mu_shift.size() != 0 && config.mu_shift.size() != model.dim()) {
    throw InvalidParameter("mu_shift length must equal the model dimension");
  }

  std::vector<Eigen::Index> quantities;
  std::vector<std::string> names;
  if (config.margins.empty()) {
    names = model.quantity_names();
    for (std::size_t i = 0; i < names.size(); ++i) quantities.push_back(static_cast<Eigen::Index>(i));
  } else {
    for (const auto& m : config.margins) {
      quantities.push_back(resolve_quantity(model, m));
      names.push_back(m);
    }
  }

  const std::size_t reps = config.replications;
  std::vector<std::optional<Eigen::VectorXd>> rows(reps);

  parallel_for(reps, [&](std::size_t j) {
    Rng rng = make_rng(seed, j);
    const Eigen::VectorXd theta0 = model.sample_prior(rng);
    const std::unique_ptr<Model> replicate = model.simulate(theta0, rng);
    MeanFieldGaussian q;
    if (config.oracle) {
      auto exact = replicate->exact_posterior();
      if (!exact) throw InvalidParameter("oracle mode needs a model with an exact posterior");
      q = std::move(*exact);
    } else {
      ViConfig vi = config.vi;
      vi.seed = derive_seed(rng(), j);
      try {
        q = advi_fit(*replicate, vi).q;
      } catch (const Error&) {
        return;  // counted as a failure
      }
    }
    if (config.mu_shift.size() != 0) q.mu += config.mu_shift;
    Eigen::VectorXd row(static_cast<Eigen::Index>(quantities.size()));
    for (std::size_t m = 0; m < quantities.size(); ++m) {
      row[static_cast<Eigen::Index>(m)] = calibration_prob(q, *replicate, theta0, quantities[m], &rng, config.mc_draws);
    }
    rows[j] = std::move(row);
  });

  VsbcReport report;
  report.margin_names = names;
  report.replications = reps;
  report.alpha = config.alpha;
  report.expected_false_flags = config.alpha * static_cast<double>(quantities.size());
  for (std::size_t j = 0; j < reps; ++j) {
    if (!rows[j]) ++report.failures;
  }
  if (static_cast<double>(report.failures) > config.max_failure_fraction * static_cast<double>(reps)) {
    throw VsbcAborted("VSBC aborted: " + std::to_string(report.failures) + " of " + std::to_string(reps) +
                          " replications failed to fit",
                      report.failures, reps);
  }
  const std::size_t ok = reps - report.failures;
  if (ok < 2) throw VsbcAborted("VSBC aborted: fewer than 2 successful replications", report.failures, reps);

  report.pvals.resize(static_cast<Eigen::Index>(ok), static_cast<Eigen::Index>(quantities.size()));
  Eigen::Index r = 0;
  for (std::size_t j = 0; j < reps; ++j) {
    if (!rows[j]) continue;
    report.pvals.row(r++) = rows[j]->transpose();
    report.replication_index.push_back(j);
  }
  for (std::size_t m = 0; m < quantities.size(); ++m) {
    const Eigen::VectorXd col = report.pvals.col(static_cast<Eigen::Index>(m));
    MarginResult res =
        symmetry_test(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), config.alpha,
                      config.n_bins);
    res.name = names[m];
    res.quantity = quantities[m];
    report.margins.push_back(std::move(res));
  }
  return report;
}

}  // namespace vidiag
