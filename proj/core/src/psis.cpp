#include "vidiag/psis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "vidiag/error.hpp"

namespace vidiag {

void DrawBatch::validate() const {
  if (log_target.size() != log_proposal.size()) {
    throw InvalidParameter("log_target and log_proposal lengths differ");
  }
  if (draws.cols() > 0 && draws.rows() != log_target.size()) {
    throw InvalidParameter("draw matrix rows do not match density vector length");
  }
  for (Eigen::Index s = 0; s < log_target.size(); ++s) {
    if (!std::isfinite(log_target[s])) {
      throw InputError("non-finite log_target at draw " + std::to_string(s), static_cast<std::size_t>(s));
    }
    if (!std::isfinite(log_proposal[s])) {
      throw InputError("non-finite log_proposal at draw " + std::to_string(s), static_cast<std::size_t>(s));
    }
    if (draws.cols() > 0 && !draws.row(s).allFinite()) {
      throw InputError("non-finite parameter value at draw " + std::to_string(s), static_cast<std::size_t>(s));
    }
  }
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Good:
      return "Good";
    case Category::Ok:
      return "Ok";
    case Category::Bad:
      return "Bad";
  }
  return "Bad";
}

Category khat_category(double khat) {
  if (khat < 0.5) return Category::Good;
  if (khat <= 0.7) return Category::Ok;
  return Category::Bad;
}

LogRatios log_ratios(std::span<const double> log_target, std::span<const double> log_proposal) {
  if (log_target.size() != log_proposal.size()) {
    throw InvalidParameter("log_target and log_proposal lengths differ");
  }
  LogRatios out;
  const auto n = static_cast<Eigen::Index>(log_target.size());
  out.values.resize(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    out.values[s] = log_target[static_cast<std::size_t>(s)] - log_proposal[static_cast<std::size_t>(s)];
  }
  if (n > 0) {
    out.shift = out.values.maxCoeff();
    out.values.array() -= out.shift;
  }
  return out;
}

LogRatios log_ratios(const DrawBatch& batch) {
  batch.validate();
  return log_ratios(std::span<const double>(batch.log_target.data(), static_cast<std::size_t>(batch.size())),
                    std::span<const double>(batch.log_proposal.data(), static_cast<std::size_t>(batch.size())));
}

std::size_t psis_tail_length(std::size_t draws) {
  const std::size_t by_fraction = draws / 5;
  const auto by_sqrt = static_cast<std::size_t>(std::ceil(3.0 * std::sqrt(static_cast<double>(draws))));
  return std::min(by_fraction, by_sqrt);
}

SmoothedWeights psis_smooth(std::span<const double> input, const PsisOptions& options) {
  const std::size_t n = input.size();
  if (n < kMinSmoothingDraws) {
    throw InvalidParameter("Pareto smoothing needs at least 25 draws, got " + std::to_string(n));
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (!std::isfinite(input[s])) {
      throw InputError("non-finite log ratio at draw " + std::to_string(s), s);
    }
  }

  SmoothedWeights out;
  out.regularized = options.regularize;

  // Work relative to the maximum so that the largest raw ratio is exp(0).
  const double max_lr = *std::max_element(input.begin(), input.end());
  const double min_lr = *std::min_element(input.begin(), input.end());
  Eigen::VectorXd lw(static_cast<Eigen::Index>(n));
  for (std::size_t s = 0; s < n; ++s) lw[static_cast<Eigen::Index>(s)] = input[s] - max_lr;

  const std::size_t tail = psis_tail_length(n);
  out.tail_count = tail;

  if (max_lr == min_lr) {
    out.constant_ratios = true;
    out.category = Category::Good;
    out.log_weights = lw;
    out.weights = lw.array().exp();
    return out;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Ascending by log ratio; ties broken by index so the result is deterministic.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lw[static_cast<Eigen::Index>(a)] < lw[static_cast<Eigen::Index>(b)];
  });

  const std::size_t first_tail = n - tail;
  const double cutoff = lw[static_cast<Eigen::Index>(order[first_tail - 1])];
  const double exp_cutoff = std::exp(cutoff);

  // Tail members strictly above the threshold, ascending.
  std::vector<std::size_t> tail_index;
  std::vector<double> exceedances;
  tail_index.reserve(tail);
  exceedances.reserve(tail);
  for (std::size_t r = first_tail; r < n; ++r) {
    const double e = std::exp(lw[static_cast<Eigen::Index>(order[r])]) - exp_cutoff;
    if (e > 0.0) {
      tail_index.push_back(order[r]);
      exceedances.push_back(e);
    }
  }

  try {
    ParetoFit fit = fit_gpd_exceedances(exceedances);
    fit.threshold = exp_cutoff;
    out.khat_raw = fit.k_raw;
    out.khat_reg = fit.k_reg;
    out.pareto_fit = fit;
  } catch (const InsufficientTail&) {
    out.fit_failed = true;
  } catch (const DegenerateTail&) {
    out.fit_failed = true;
  }

  if (!out.fit_failed && std::isfinite(out.khat()) && std::isfinite(out.pareto_fit->sigma) &&
      out.pareto_fit->sigma > 0.0) {
    const GpdParams gp{exp_cutoff, out.pareto_fit->sigma, out.khat()};
    const double m = static_cast<double>(tail_index.size());
    for (std::size_t z = 0; z < tail_index.size(); ++z) {
      const double u = (static_cast<double>(z) + 0.5) / m;
      lw[static_cast<Eigen::Index>(tail_index[z])] = std::log(gpd_quantile(u, gp));
    }
  } else if (!out.fit_failed) {
    // Non-finite shape or scale: leave the ratios alone.
    out.fit_failed = true;
  }

  // Truncate at the raw maximum, which is zero after the shift.
  for (Eigen::Index s = 0; s < lw.size(); ++s) {
    if (!(lw[s] <= 0.0)) lw[s] = 0.0;
  }

  out.category = out.fit_failed ? Category::Bad : khat_category(out.khat());
  out.log_weights = lw;
  out.weights = lw.array().exp();
  return out;
}

double snis_estimate(std::span<const double> h, std::span<const double> weights) {
  if (h.size() != weights.size()) {
    throw InvalidParameter("h and weight lengths differ");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t s = 0; s < h.size(); ++s) {
    num += h[s] * weights[s];
    den += 1.0 * weights[s];
  }
  if (!(den > 0.0)) throw DegenerateWeights("importance weights sum to zero");
  return num / den;
}

double snis_estimate(const Eigen::VectorXd& h, const SmoothedWeights& weights) {
  return snis_estimate(std::span<const double>(h.data(), static_cast<std::size_t>(h.size())),
                       std::span<const double>(weights.weights.data(),
                                               static_cast<std::size_t>(weights.weights.size())));
}

Moments weighted_moments(const Eigen::MatrixXd& draws, const Eigen::VectorXd& weights) {
  if (draws.rows() != weights.size()) {
    throw InvalidParameter("draw count and weight count differ");
  }
  const double total = weights.sum();
  if (!(total > 0.0)) throw DegenerateWeights("importance weights sum to zero");
  Moments m;
  m.mean = (draws.transpose() * weights) / total;
  m.second = (draws.array().square().matrix().transpose() * weights) / total;
  return m;
}

Moments psis_moments(const DrawBatch& batch, const SmoothedWeights& weights) {
  if (batch.dim() == 0) throw InvalidParameter("draw batch carries no parameter columns");
  return weighted_moments(batch.draws, weights.weights);
}

Moments plain_moments(const Eigen::MatrixXd& draws) {
  return weighted_moments(draws, Eigen::VectorXd::Ones(draws.rows()));
}

RenyiOrder khat_to_renyi_order(double khat) {
  if (!(khat > 0.0)) return {std::numeric_limits<double>::infinity(), true};
  return {1.0 / khat, false};
}

}  // namespace vidiag
