#pragma once

#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace couette {

// Round-trip representation of a double (%.17g).
std::string format_double(double x);

using CsvCell = std::variant<double, long long, std::string>;

class CsvWriter {
 public:
  CsvWriter() = default;
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  bool is_open() const { return out_.is_open(); }
  void row(const std::vector<CsvCell>& cells);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
  std::size_t width_ = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace couette
