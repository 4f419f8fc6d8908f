#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace macroml {

/// Calendar month, stored as a running month count so arithmetic is exact.
class YearMonth {
 public:
  constexpr YearMonth() = default;
  constexpr YearMonth(int year, int month) : index_(year * 12 + (month - 1)) {}

  static constexpr YearMonth from_index(std::int32_t index) {
    YearMonth ym;
    ym.index_ = index;
    return ym;
  }

  /// Accepts YYYY-MM-DD, YYYY-MM, YYYY:MM, YYYYMmm and the M/D/YYYY form used by
  /// FRED-MD vintages. Throws ParseError on anything else.
  static YearMonth parse(std::string_view text);

  constexpr int year() const { return floor_div(index_, 12); }
  constexpr int month() const { return index_ - floor_div(index_, 12) * 12 + 1; }
  constexpr std::int32_t index() const { return index_; }

  /// "YYYY-MM"
  std::string str() const;

  constexpr YearMonth operator+(int months) const { return from_index(index_ + months); }
  constexpr YearMonth operator-(int months) const { return from_index(index_ - months); }
  constexpr int operator-(YearMonth other) const { return index_ - other.index_; }
  constexpr YearMonth& operator+=(int months) {
    index_ += months;
    return *this;
  }

  constexpr auto operator<=>(const YearMonth&) const = default;

 private:
  static constexpr int floor_div(int a, int b) { return (a >= 0) ? a / b : -((-a + b - 1) / b); }
  std::int32_t index_ = 0;
};

}  // namespace macroml
