#pragma once

#include <string>
#include <vector>

namespace icagg {

// Single numeric column, one value per line. When has_header is true the
// first line is skipped. Throws DataError with "path:line:" context on
// malformed cells, and on empty data.
std::vector<double> read_column_csv(const std::string& path, bool has_header);

// Rectangular comma-separated numeric matrix (no header).
std::vector<std::vector<double>> read_matrix_csv(const std::string& path);

// Shortest round-trip decimal rendering; keeps emitted files byte-stable
// across runs.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace icagg
