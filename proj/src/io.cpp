#include "icagg/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "icagg/errors.hpp"

namespace icagg {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& cell, const std::string& path,
                  std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    if (!std::isfinite(v)) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": non-finite value '" + cell + "'");
    }
    return v;
  } catch (const DataError&) {
    throw;
  } catch (const std::exception&) {
    throw DataError(path + ":" + std::to_string(line_no) +
                    ": malformed numeric cell '" + cell + "'");
  }
}

}  // namespace

std::vector<double> read_column_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && has_header) continue;
    std::string cell = trim(line);
    if (cell.empty()) continue;
    if (cell.find(',') != std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected a single column");
    }
    out.push_back(parse_cell(cell, path, line_no));
  }
  if (out.empty()) throw DataError(path + ": empty sample");
  return out;
}

std::vector<std::vector<double>> read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      row.push_back(parse_cell(trim(cell), path, line_no));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": ragged row in matrix");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": empty matrix");
  return rows;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
}

}  // namespace icagg
