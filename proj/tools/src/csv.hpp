#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ipower::cli {

// 12 significant digits, '.' decimal point regardless of locale.
std::string format_number(double x);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  CsvWriter& cell(double x);
  CsvWriter& cell(int x);
  CsvWriter& cell(std::string_view text);
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

}  // namespace ipower::cli
