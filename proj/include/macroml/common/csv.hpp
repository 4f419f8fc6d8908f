#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace macroml::csv {

/// Splits one RFC-4180 record. Quoted fields may contain commas and doubled quotes;
/// embedded newlines are not supported.
std::vector<std::string> split_record(std::string_view line);

/// Quotes a field when it contains a comma, quote, or leading/trailing space.
std::string quote(std::string_view field);

void write_record(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest round-trip decimal representation ("%.17g" trimmed).
std::string format_double(double x);

}  // namespace macroml::csv
