#ifndef VIDIAG_CLI_INGEST_HPP
#define VIDIAG_CLI_INGEST_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "vidiag/psis.hpp"

namespace vidiag::cli {

/// A DrawBatch read from CSV together with its draw column names.
struct DrawFile {
  DrawBatch batch;
  std::vector<std::string> names;
};

/// Columns log_p and log_q are required; every other column is a draw
/// coordinate, in header order. Throws InputError with the 1-based line
/// number on malformed rows and InvalidParameter on missing columns.
DrawFile read_draws_csv(std::istream& in);
DrawFile read_draws_csv(const std::filesystem::path& path);

/// Inverse of read_draws_csv; doubles are written in shortest round-trip form.
void write_draws_csv(std::ostream& out, const DrawBatch& batch, const std::vector<std::string>& names);

}  // namespace vidiag::cli

#endif
