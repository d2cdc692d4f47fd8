#ifndef VIDIAG_CLI_REPORT_HPP
#define VIDIAG_CLI_REPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "vidiag/psis.hpp"
#include "vidiag/vi.hpp"
#include "vidiag/vsbc.hpp"
#include "vidiag_cli/run_config.hpp"

namespace vidiag::cli {

inline constexpr const char* kReportSchemaVersion = "1";

/// Finite doubles as numbers, everything else as null.
nlohmann::json number(double value);

/// {tool, version, schema, command, seed, config}. No timestamps or host
/// details, so reports are byte-identical across runs.
nlohmann::json provenance(const RunConfig& cfg);

/// PSIS diagnostic fields plus plain-VI and PSIS moments per coordinate.
nlohmann::json psis_json(const SmoothedWeights& w, const DrawBatch& batch, const std::vector<std::string>& names);

nlohmann::json vi_fit_json(const ViFit& fit);

nlohmann::json vsbc_json(const VsbcReport& report);

/// Pretty-printed JSON with a trailing newline.
std::string dump(const nlohmann::json& j);

/// Atomic writes of JSON and CSV text under cfg.out.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// One row per replication: replication, then one column per margin.
std::string pvals_csv(const VsbcReport& report);
/// bin_lo,bin_hi,count for one margin.
std::string histogram_csv(const Histogram& h);
/// iteration,elbo,rel_change,window_mean,window_median.
std::string trace_csv(const std::vector<ElboTraceEntry>& trace);
/// param,mu,omega,sd.
std::string q_csv(const MeanFieldGaussian& q, const std::vector<std::string>& names);
/// index,log_weight,weight.
std::string weights_csv(const SmoothedWeights& w);

/// Margin name made safe for a file name.
std::string file_stem(const std::string& name);

}  // namespace vidiag::cli

#endif
