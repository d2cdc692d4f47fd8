#include "vidiag_cli/ingest.hpp"

#include <fstream>
#include <ostream>

#include "vidiag/csv.hpp"
#include "vidiag/error.hpp"

namespace vidiag::cli {

DrawFile read_draws_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  const long p_col = table.column("log_p");
  const long q_col = table.column("log_q");
  if (p_col < 0 || q_col < 0) throw InputError("draws file needs 'log_p' and 'log_q' columns", 1);

  DrawFile f;
  std::vector<std::size_t> draw_cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (static_cast<long>(c) == p_col || static_cast<long>(c) == q_col) continue;
    draw_cols.push_back(c);
    f.names.push_back(table.header[c]);
  }
  const auto s = static_cast<Eigen::Index>(table.rows.size());
  f.batch.log_target.resize(s);
  f.batch.log_proposal.resize(s);
  f.batch.draws.resize(s, static_cast<Eigen::Index>(draw_cols.size()));
  for (Eigen::Index i = 0; i < s; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    f.batch.log_target[i] = row[static_cast<std::size_t>(p_col)];
    f.batch.log_proposal[i] = row[static_cast<std::size_t>(q_col)];
    for (std::size_t j = 0; j < draw_cols.size(); ++j) f.batch.draws(i, static_cast<Eigen::Index>(j)) = row[draw_cols[j]];
  }
  return f;
}

DrawFile read_draws_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open draws file: " + path.string());
  return read_draws_csv(in);
}

void write_draws_csv(std::ostream& out, const DrawBatch& batch, const std::vector<std::string>& names) {
  std::vector<std::string> header{"log_p", "log_q"};
  header.insert(header.end(), names.begin(), names.end());
  write_csv_header(out, header);
  std::vector<double> row(header.size());
  for (Eigen::Index s = 0; s < batch.size(); ++s) {
    row[0] = batch.log_target[s];
    row[1] = batch.log_proposal[s];
    for (Eigen::Index j = 0; j < batch.dim(); ++j) row[2 + static_cast<std::size_t>(j)] = batch.draws(s, j);
    write_csv_row(out, row);
  }
}

}  // namespace vidiag::cli
