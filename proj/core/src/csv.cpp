#include "alm/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "alm/errors.hpp"

namespace alm {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

CsvTable CsvTable::parse(std::string_view text, const std::string& source) {
  CsvTable t;
  t.source_ = source;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto cells = split(s);
    if (t.header_.empty()) {
      t.header_ = std::move(cells);
      continue;
    }
    if (cells.size() > t.header_.size())
      throw DataError(source + ": line " + std::to_string(lineno) + " has more cells than the header");
    cells.resize(t.header_.size());
    t.cells_.push_back(std::move(cells));
  }
  if (t.header_.empty()) throw DataError(source + ": missing header");
  return t;
}

CsvTable CsvTable::read(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

bool CsvTable::has(const std::string& column) const {
  return std::find(header_.begin(), header_.end(), column) != header_.end();
}

std::size_t CsvTable::column_index(const std::string& column) const {
  const auto it = std::find(header_.begin(), header_.end(), column);
  if (it == header_.end()) throw DataError(source_ + ": missing column '" + column + "'");
  return static_cast<std::size_t>(it - header_.begin());
}

const std::string& CsvTable::text(std::size_t row, const std::string& column) const {
  return cells_.at(row)[column_index(column)];
}

std::optional<double> CsvTable::optional_number(std::size_t row, const std::string& column) const {
  if (!has(column)) return std::nullopt;
  const std::string& s = text(row, column);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw DataError(source_ + ": row " + std::to_string(row + 1) + " column '" + column + "' is not a number: " + s);
  return v;
}

double CsvTable::number(std::size_t row, const std::string& column) const {
  const auto v = optional_number(row, column);
  if (!v) throw DataError(source_ + ": row " + std::to_string(row + 1) + " column '" + column + "' is empty");
  return *v;
}

}  // namespace alm
