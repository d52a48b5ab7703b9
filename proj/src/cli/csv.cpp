#include "statediv/cli/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "statediv/numfmt.hpp"

#ifndef STATEDIV_GIT_HASH
#define STATEDIV_GIT_HASH "unknown"
#endif

namespace statediv::cli {

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  add_row(std::move(cells));
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw std::invalid_argument("row has " + std::to_string(cells.size()) + " cells, header has " +
                                std::to_string(header_.size()));
  }
  rows_.push_back(std::move(cells));
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end()) throw std::out_of_range("no column '" + name + "'");
  return static_cast<std::size_t>(it - header_.begin());
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  const std::string& cell = rows_.at(row).at(column(name));
  if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
  return std::stod(cell);
}

void CsvTable::write(std::ostream& os) const {
  for (const auto& [key, value] : metadata_) os << "# " << key << ": " << value << '\n';
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header_);
  for (const auto& row : rows_) line(row);
}

std::string CsvTable::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

std::string build_revision() { return STATEDIV_GIT_HASH; }

}  // namespace statediv::cli
