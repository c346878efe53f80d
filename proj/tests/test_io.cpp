#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "icagg/errors.hpp"
#include "icagg/io.hpp"

using namespace icagg;

namespace {

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / "icagg_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = scratch() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path.string();
}

template <typename F>
std::string thrown_message(F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("single column csv with header") {
  const auto path = write_temp("col.csv", "loss\n1.5\n-2\n3e2\n");
  const auto vals = read_column_csv(path, true);
  CHECK(vals == std::vector<double>{1.5, -2.0, 300.0});
}

TEST_CASE("single column csv without header") {
  const auto path = write_temp("noheader.csv", "0.25\n0.75\n");
  CHECK(read_column_csv(path, false) == std::vector<double>{0.25, 0.75});
}

TEST_CASE("csv errors carry file and line context") {
  const auto bad = write_temp("bad.csv", "x\n1.0\noops\n2.0\n");
  CHECK_THROWS_AS(read_column_csv(bad, true), DataError);
  const auto msg = thrown_message([&] { read_column_csv(bad, true); });
  CHECK(msg.find(bad) != std::string::npos);
  CHECK(msg.find(":3") != std::string::npos);

  const auto empty = write_temp("empty.csv", "x\n");
  CHECK_THROWS_AS(read_column_csv(empty, true), DataError);

  const auto wide = write_temp("wide.csv", "x\n1,2\n");
  CHECK_THROWS_AS(read_column_csv(wide, true), DataError);

  CHECK_THROWS_AS(read_column_csv("/nonexistent/file.csv", true), DataError);
}

TEST_CASE("matrix csv") {
  const auto path = write_temp("mat.csv", "1,0.5\n0.5,1\n");
  const auto m = read_matrix_csv(path);
  REQUIRE(m.size() == 2);
  CHECK(m[0] == std::vector<double>{1.0, 0.5});
  CHECK(m[1] == std::vector<double>{0.5, 1.0});

  const auto ragged = write_temp("ragged.csv", "1,2\n3\n");
  CHECK_THROWS_AS(read_matrix_csv(ragged), DataError);
}

TEST_CASE("format_double round trips exactly") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 12345.6789, 0.0, -0.0, 2.5e17}) {
    const std::string s = format_double(v);
    double back = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
    REQUIRE(res.ec == std::errc());
    CHECK(back == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("write then read text") {
  const auto path = (scratch() / "roundtrip.csv").string();
  write_text_file(path, "x\n0.125\n");
  CHECK(read_column_csv(path, true) == std::vector<double>{0.125});
}
