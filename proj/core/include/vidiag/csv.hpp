#ifndef VIDIAG_CSV_HPP
#define VIDIAG_CSV_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace vidiag {

/// Numeric table with named columns, read from comma-separated text with a
/// header row. Values use '.' as the decimal separator.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column index by name, or -1.
  long column(std::string_view name) const;
};

/// Parses a table. Throws InputError carrying the 1-based line number for
/// ragged rows and unparsable or non-finite fields.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

/// Shortest round-trip decimal text for a double.
std::string format_double(double value);

void write_csv_row(std::ostream& out, const std::vector<double>& values);
void write_csv_header(std::ostream& out, const std::vector<std::string>& names);

/// Writes contents to path via a temporary file in the same directory and
/// a rename, so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace vidiag

#endif
