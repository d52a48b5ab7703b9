#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace statediv::cli {

/// Rectangular table written as CSV with '#'-prefixed metadata lines first.
/// Cells are stored as text; numeric cells use the shortest round-trip form.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(const std::vector<double>& values);
  void add_row(std::vector<std::string> cells);
  void add_meta(std::string key, std::string value) { metadata_.emplace_back(std::move(key), std::move(value)); }

  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& metadata() const noexcept { return metadata_; }

  /// Index of a header column; throws std::out_of_range if absent.
  std::size_t column(const std::string& name) const;
  /// Parsed numeric value of a cell ("nan"/"inf" accepted).
  double number(std::size_t row, const std::string& name) const;

  void write(std::ostream& os) const;
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::pair<std::string, std::string>> metadata_;
};

/// Commit hash recorded at configure time, or "unknown".
std::string build_revision();

}  // namespace statediv::cli
