#pragma once

// Minimal deterministic CSV output: comma separator, '.' decimal point,
// shortest round-trip formatting for doubles.

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace qrc::csv {

std::string num(double value);
std::string num(std::int64_t value);
inline std::string num(int value) { return num(static_cast<std::int64_t>(value)); }
inline std::string num(std::uint64_t value) { return std::to_string(value); }

/// Quotes fields containing separators, quotes or newlines.
std::string field(std::string_view text);

void write_row(std::ostream& out, const std::vector<std::string>& fields);
void write_row(std::ostream& out, std::initializer_list<std::string> fields);

}  // namespace qrc::csv
