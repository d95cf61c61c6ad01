#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace ipower::cli {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), columns_(header.size()) {
  for (const auto& h : header) cell(h);
  end_row();
}

void CsvWriter::separator() {
  if (filled_ > 0) out_ << ',';
  ++filled_;
}

CsvWriter& CsvWriter::cell(double x) {
  separator();
  out_ << format_number(x);
  return *this;
}

CsvWriter& CsvWriter::cell(int x) {
  separator();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  separator();
  out_ << text;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw std::logic_error("csv row has the wrong number of cells");
  out_ << '\n';
  filled_ = 0;
}

}  // namespace ipower::cli
