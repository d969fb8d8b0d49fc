#include "repqed/csv.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "repqed/config.hpp"

namespace repqed::cli {

std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header)
    : header_(std::move(header)) {
  if (header_.empty())
    throw std::invalid_argument("CsvTable: empty header");
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw std::invalid_argument("CsvTable: row width mismatch");
  rows_.push_back(std::move(cells));
}

void CsvTable::write(std::ostream& out, std::uint64_t config_hash) const {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config_hash));
  out << "# config_hash = " << hash << "\n";
  auto write_cells = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ",";
      out << cells[i];
    }
    out << "\n";
  };
  write_cells(header_);
  for (const auto& row : rows_) write_cells(row);
}

void write_table(const CsvTable& table, const std::string& out_path,
                 std::uint64_t config_hash, std::ostream& fallback) {
  if (out_path.empty()) {
    table.write(fallback, config_hash);
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open output file '" + out_path + "'");
  table.write(out, config_hash);
  out.flush();
  if (!out) throw IoError("failed writing output file '" + out_path + "'");
}

}  // namespace repqed::cli
