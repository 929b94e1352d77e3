// Minimal numeric CSV reading and round-trip formatting of doubles.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sonarloc {

/// Shortest decimal text that parses back to exactly the same double.
std::string fmt_double(double v);

/// Reads a header-checked CSV whose cells are all numeric.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::vector<std::string> expected_header);

  /// Fills `row` with the next record; false at end of input.
  bool next(std::vector<double>& row);
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t columns_;
  std::size_t line_ = 1;
};

}  // namespace sonarloc
