#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace alm {

// Header-addressed CSV; '#' lines and blank lines are skipped.
class CsvTable {
 public:
  static CsvTable parse(std::string_view text, const std::string& source = "csv");
  static CsvTable read(const std::string& path);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return cells_.size(); }
  bool has(const std::string& column) const;

  const std::string& text(std::size_t row, const std::string& column) const;
  double number(std::size_t row, const std::string& column) const;
  std::optional<double> optional_number(std::size_t row, const std::string& column) const;

 private:
  std::size_t column_index(const std::string& column) const;

  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> cells_;
};

}  // namespace alm
