#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavefocus {

/// Fixed "%.17g" formatting so that identical runs produce byte-identical files.
inline std::string csv_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct CsvColumn {
  std::string name;
  const std::vector<double>* data;
};

inline void write_csv(const std::string& path, const std::vector<CsvColumn>& columns) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  std::size_t rows = 0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out << ",";
    out << columns[c].name;
    rows = std::max(rows, columns[c].data->size());
  }
  out << "\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out << ",";
      if (r < columns[c].data->size()) out << csv_number((*columns[c].data)[r]);
    }
    out << "\n";
  }
}

inline void write_matrix_csv(const std::string& path,
                             const std::vector<std::vector<double>>& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_matrix_csv: cannot open " + path);
  for (const auto& row : m) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ",";
      out << csv_number(row[c]);
    }
    out << "\n";
  }
}

}  // namespace wavefocus
