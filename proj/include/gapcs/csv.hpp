#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "gapcs/errors.hpp"
#include "gapcs/matrix_io.hpp"

namespace gapcs {

/// UTF-8 CSV with a header row; floats rendered with %.17g.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw ParseError("cannot open " + path.string() + " for writing");
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  static std::string cell(double v) { return format_double(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::uint64_t v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  static std::string cell(const char* v) { return v; }
  static std::string cell(const std::string& v) { return v; }

 private:
  std::ofstream out_;
};

/// In-memory CSV table; cells stay strings, numeric access on demand.
/// Empty cells read as NaN.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  static CsvTable load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    CsvTable table;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() && !saw_header) continue;
      std::vector<std::string> cells;
      std::size_t pos = 0;
      while (true) {
        const std::size_t comma = line.find(',', pos);
        cells.push_back(line.substr(
            pos, comma == std::string::npos ? comma : comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (!saw_header) {
        table.columns = std::move(cells);
        saw_header = true;
      } else {
        if (cells.size() != table.columns.size()) {
          throw ParseError("ragged row in " + path.string());
        }
        table.rows.push_back(std::move(cells));
      }
    }
    if (!saw_header) throw ParseError("missing header in " + path.string());
    return table;
  }

  int column_index(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    return it == columns.end()
               ? -1
               : static_cast<int>(std::distance(columns.begin(), it));
  }

  double number(std::size_t row, int col) const {
    const std::string& cell = rows.at(row).at(static_cast<std::size_t>(col));
    if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0') {
      throw ParseError("non-numeric cell '" + cell + "'");
    }
    return v;
  }

  const std::string& text(std::size_t row, int col) const {
    return rows.at(row).at(static_cast<std::size_t>(col));
  }
};

inline double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace gapcs
