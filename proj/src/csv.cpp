#include "sonarloc/csv.hpp"

#include <charconv>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace sonarloc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvReader::CsvReader(std::istream& in, std::vector<std::string> expected)
    : in_(in), columns_(expected.size()) {
  std::string header;
  if (!std::getline(in_, header)) throw std::runtime_error("csv: missing header");
  const auto cells = split(trim(header));
  if (cells != expected) {
    std::string want;
    for (const auto& c : expected) want += (want.empty() ? "" : ",") + c;
    throw std::runtime_error("csv: expected header '" + want + "', got '" +
                             trim(header) + "'");
  }
}

bool CsvReader::next(std::vector<double>& row) {
  std::string raw;
  while (std::getline(in_, raw)) {
    ++line_;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != columns_) {
      throw std::runtime_error("csv: line " + std::to_string(line_) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(columns_));
    }
    row.resize(columns_);
    for (std::size_t i = 0; i < columns_; ++i) {
      const auto& c = cells[i];
      auto res = std::from_chars(c.data(), c.data() + c.size(), row[i]);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size()) {
        throw std::runtime_error("csv: line " + std::to_string(line_) +
                                 ": not a number '" + c + "'");
      }
    }
    return true;
  }
  return false;
}

}  // namespace sonarloc
