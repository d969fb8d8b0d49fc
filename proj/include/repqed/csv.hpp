#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace repqed::cli {

// Serializes a double with 12 significant digits (round-trips cleanly for
// regression diffing while staying readable).
std::string format_g12(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  // First line records the config hash, then the header, then the rows.
  void write(std::ostream& out, std::uint64_t config_hash) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Writes to `out_path`, or to the given stream when the path is empty.
// Throws IoError on filesystem failure.
void write_table(const CsvTable& table, const std::string& out_path,
                 std::uint64_t config_hash, std::ostream& fallback);

}  // namespace repqed::cli
