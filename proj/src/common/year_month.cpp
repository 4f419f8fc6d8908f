#include "macroml/common/year_month.hpp"

#include <charconv>
#include <cstdio>

#include "macroml/common/error.hpp"

namespace macroml {
namespace {

bool to_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '"' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '"' || s.back() == '\r' || s.back() == '\t'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

YearMonth YearMonth::parse(std::string_view raw) {
  const std::string_view text = trim(raw);
  int year = 0, month = 0, day = 0;
  auto fail = [&]() -> YearMonth { throw ParseError("unrecognised date '" + std::string(text) + "'"); };

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    // M/D/YYYY
    auto slash2 = text.find('/', slash + 1);
    if (slash2 == std::string_view::npos) return fail();
    if (!to_int(text.substr(0, slash), month) || !to_int(text.substr(slash + 1, slash2 - slash - 1), day) ||
        !to_int(text.substr(slash2 + 1), year))
      return fail();
  } else if (text.size() >= 7 && (text[4] == '-' || text[4] == ':' || text[4] == 'M' || text[4] == 'm')) {
    if (!to_int(text.substr(0, 4), year)) return fail();
    std::string_view rest = text.substr(5);
    auto dash = rest.find('-');
    if (!to_int(rest.substr(0, dash), month)) return fail();
    if (dash != std::string_view::npos && !to_int(rest.substr(dash + 1), day)) return fail();
  } else {
    return fail();
  }
  if (month < 1 || month > 12 || year < 1000 || year > 9999 || day < 0 || day > 31) return fail();
  return YearMonth(year, month);
}

std::string YearMonth::str() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year(), month());
  return buf;
}

}  // namespace macroml
