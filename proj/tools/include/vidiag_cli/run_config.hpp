#ifndef VIDIAG_CLI_RUN_CONFIG_HPP
#define VIDIAG_CLI_RUN_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vidiag/vi.hpp"

namespace vidiag::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,      ///< bad flags, unreadable or malformed input
  kExitBad = 2,        ///< PSIS category Bad
  kExitDiverged = 3,   ///< VI divergence or aborted VSBC
};

/// Settings for one command. A JSON run file fills these first; command
/// line flags override individual fields.
struct RunConfig {
  std::string command;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = ".";
  std::optional<std::filesystem::path> input;  ///< psis: draws CSV
  std::optional<std::filesystem::path> data;   ///< regression dataset CSV
  std::string model;
  nlohmann::json model_options = nlohmann::json::object();
  std::size_t s_draws = 10000;
  std::size_t m_reps = 100;
  bool m_reps_given = false;  ///< demos keep their own M unless this is set
  double alpha = 0.05;
  std::vector<std::string> margins;
  bool khat_reg = true;
  bool oracle = false;
  bool write_weights = false;
  bool write_draws = false;  ///< psis model runs: export draws.csv
  ViConfig vi;
  bool vi_seed_given = false;
  std::string demo;

  /// Throws InvalidParameter for a missing seed, unknown keys in the model
  /// options are left to the model registry.
  void validate() const;
  /// Resolved settings, echoed in report provenance.
  nlohmann::json to_json() const;
};

/// Applies the keys of a run file on top of cfg. Unknown keys are errors.
void apply_run_file(const nlohmann::json& file, RunConfig& cfg);
nlohmann::json load_json_file(const std::filesystem::path& path);

/// Root seed for a named stream of this run.
std::uint64_t stream_seed(const RunConfig& cfg, std::uint64_t stream);

inline constexpr std::uint64_t kDataStream = 1;
inline constexpr std::uint64_t kViStream = 2;
inline constexpr std::uint64_t kDrawStream = 3;
inline constexpr std::uint64_t kVsbcStream = 4;
inline constexpr std::uint64_t kReferenceStream = 5;

}  // namespace vidiag::cli

#endif
