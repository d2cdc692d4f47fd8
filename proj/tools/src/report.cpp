#include "vidiag_cli/report.hpp"

#include <cmath>
#include <sstream>

#include "vidiag/csv.hpp"

namespace vidiag::cli {

namespace {

std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  write_csv_header(out, header);
  for (const auto& r : rows) write_csv_row(out, r);
  return out.str();
}

nlohmann::json moments_json(const Moments& m, const std::vector<std::string>& names) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.mean.size(); ++i) {
    const double var = m.second[i] - m.mean[i] * m.mean[i];
    arr.push_back({{"name", names[static_cast<std::size_t>(i)]},
                   {"mean", number(m.mean[i])},
                   {"second_moment", number(m.second[i])},
                   {"sd", number(std::sqrt(std::max(var, 0.0)))}});
  }
  return arr;
}

nlohmann::json ks_json(const KsResult& r) { return {{"statistic", number(r.statistic)}, {"p_value", number(r.p_value)}}; }

}  // namespace

nlohmann::json number(double value) { return std::isfinite(value) ? nlohmann::json(value) : nlohmann::json(nullptr); }

nlohmann::json provenance(const RunConfig& cfg) {
  return {{"tool", "vidiag"},
          {"version", VIDIAG_VERSION},
          {"schema", kReportSchemaVersion},
          {"command", cfg.command},
          {"seed", cfg.seed.value_or(0)},
          {"config", cfg.to_json()}};
}

nlohmann::json psis_json(const SmoothedWeights& w, const DrawBatch& batch, const std::vector<std::string>& names) {
  nlohmann::json j;
  j["S"] = batch.size();
  j["M"] = w.tail_count;
  j["khat_raw"] = number(w.khat_raw);
  j["khat_reg"] = number(w.khat_reg);
  j["khat"] = number(w.khat());
  j["regularized"] = w.regularized;
  j["category"] = std::string(to_string(w.category));
  j["constant_ratios"] = w.constant_ratios;
  j["fit_failed"] = w.fit_failed;
  j["pareto_sigma"] = w.pareto_fit ? number(w.pareto_fit->sigma) : nlohmann::json(nullptr);
  j["pareto_threshold"] = w.pareto_fit ? number(w.pareto_fit->threshold) : nlohmann::json(nullptr);
  if (w.khat_available() && std::isfinite(w.khat())) {
    const RenyiOrder r = khat_to_renyi_order(w.khat());
    j["renyi_order"] = {{"alpha", number(r.alpha)}, {"bounded", r.bounded}};
  } else {
    j["renyi_order"] = nullptr;
  }
  j["moments"] = nullptr;
  if (batch.dim() > 0) {
    j["moments"] = {{"plain", moments_json(plain_moments(batch.draws), names)},
                    {"psis", moments_json(psis_moments(batch, w), names)}};
  }
  return j;
}

nlohmann::json vi_fit_json(const ViFit& fit) {
  return {{"iterations", fit.iterations},
          {"converged", fit.converged},
          {"final_elbo", fit.trace.empty() ? nlohmann::json(nullptr) : number(fit.trace.back().elbo)},
          {"evaluations", fit.trace.size()}};
}

nlohmann::json vsbc_json(const VsbcReport& report) {
  nlohmann::json margins = nlohmann::json::array();
  std::size_t flagged = 0;
  for (const auto& m : report.margins) {
    if (m.skew != Skew::Symmetric) ++flagged;
    margins.push_back({{"name", m.name},
                       {"skew", std::string(to_string(m.skew))},
                       {"two_sided", ks_json(m.two_sided)},
                       {"less", ks_json(m.less)},
                       {"greater", ks_json(m.greater)},
                       {"histogram", {{"edges", m.histogram.edges}, {"counts", m.histogram.counts}}}});
  }
  return {{"replications", report.replications},
          {"failures", report.failures},
          {"successful", report.replication_index.size()},
          {"alpha", report.alpha},
          {"margins", margins},
          {"flagged", flagged},
          {"expected_false_flags", report.expected_false_flags},
          {"note", "skew flags are heuristic evidence of miscalibration, not proof of bias"}};
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_file_atomic(path, dump(j)); }

std::string pvals_csv(const VsbcReport& report) {
  std::vector<std::string> header{"replication"};
  header.insert(header.end(), report.margin_names.begin(), report.margin_names.end());
  std::vector<std::vector<double>> rows;
  for (Eigen::Index r = 0; r < report.pvals.rows(); ++r) {
    std::vector<double> row{static_cast<double>(report.replication_index[static_cast<std::size_t>(r)])};
    for (Eigen::Index c = 0; c < report.pvals.cols(); ++c) row.push_back(report.pvals(r, c));
    rows.push_back(std::move(row));
  }
  return csv_text(header, rows);
}

std::string histogram_csv(const Histogram& h) {
  std::vector<std::vector<double>> rows;
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    rows.push_back({h.edges[b], h.edges[b + 1], static_cast<double>(h.counts[b])});
  }
  return csv_text({"bin_lo", "bin_hi", "count"}, rows);
}

std::string trace_csv(const std::vector<ElboTraceEntry>& trace) {
  std::ostringstream out;
  write_csv_header(out, {"iteration", "elbo", "rel_change", "window_mean", "window_median"});
  // Infinite relative changes (first entry) are left empty.
  auto cell = [](double v) { return std::isfinite(v) ? format_double(v) : std::string(); };
  for (const auto& e : trace) {
    out << e.iteration << ',' << cell(e.elbo) << ',' << cell(e.rel_change) << ',' << cell(e.window_mean) << ','
        << cell(e.window_median) << '\n';
  }
  return out.str();
}

std::string q_csv(const MeanFieldGaussian& q, const std::vector<std::string>& names) {
  std::ostringstream out;
  write_csv_header(out, {"param", "mu", "omega", "sd"});
  for (Eigen::Index i = 0; i < q.dim(); ++i) {
    out << names[static_cast<std::size_t>(i)] << ',' << format_double(q.mu[i]) << ',' << format_double(q.omega[i]) << ','
        << format_double(std::exp(q.omega[i])) << '\n';
  }
  return out.str();
}

std::string weights_csv(const SmoothedWeights& w) {
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(w.weights.size()));
  for (Eigen::Index s = 0; s < w.weights.size(); ++s) {
    rows.push_back({static_cast<double>(s), w.log_weights[s], w.weights[s]});
  }
  return csv_text({"index", "log_weight", "weight"}, rows);
}

std::string file_stem(const std::string& name) {
  std::string s = name;
  for (char& c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) c = '_';
  }
  return s;
}

}  // namespace vidiag::cli
