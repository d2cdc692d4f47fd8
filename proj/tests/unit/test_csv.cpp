#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "vidiag/csv.hpp"
#include "vidiag/error.hpp"

using namespace vidiag;

TEST_CASE("read_csv") {
  std::istringstream in("log_p,log_q\n-1.5,-2\n0,1e-3\n");
  const CsvTable t = read_csv(in);
  CHECK(t.header == std::vector<std::string>{"log_p", "log_q"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][1] == 1e-3);
  CHECK(t.column("log_q") == 1);
  CHECK(t.column("theta_1") == -1);
}

TEST_CASE("read_csv: errors carry the line number") {
  const auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      (void)read_csv(in);
    } catch (const InputError& e) {
      return e.index();
    }
    return std::size_t{0};
  };
  CHECK(line_of("a,b\n1,2\n3\n") == 3);
  CHECK(line_of("a,b\n1,2\n3,4\nx,5\n") == 4);
  CHECK(line_of("a,b\n1,nan\n") == 2);
  CHECK(line_of("a,b\n1,inf\n") == 2);
  CHECK(line_of("a,b\n1,2.5.1\n") == 2);
  CHECK(line_of("") == 1);
}

TEST_CASE("read_csv: tolerates CRLF and blank trailing lines") {
  std::istringstream in("a,b\r\n1,2\r\n\r\n");
  const CsvTable t = read_csv(in);
  CHECK(t.rows.size() == 1);
  CHECK(t.rows[0][1] == 2.0);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, -2.0, 1.0 / 3.0, 6.02214076e23, 5e-324, -0.0}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.25) == "0.25");
}

TEST_CASE("write_file_atomic") {
  const auto dir = std::filesystem::temp_directory_path() / "vidiag_csv_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.txt";
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  CHECK(s.str() == "second");
  CHECK_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
  std::filesystem::remove_all(dir);
}
