#include "qrc/csv.hpp"

#include <charconv>
#include <cmath>

namespace qrc::csv {

std::string num(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // also folds -0
  char buffer[32];
  const auto res = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, res.ptr);
}

std::string num(std::int64_t value) { return std::to_string(value); }

std::string field(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << field(fields[i]);
  }
  out << '\n';
}

void write_row(std::ostream& out, std::initializer_list<std::string> fields) {
  write_row(out, std::vector<std::string>(fields));
}

}  // namespace qrc::csv
