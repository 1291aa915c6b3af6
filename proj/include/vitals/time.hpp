#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace vitals {

/// UTC instant at second precision.
using Timestamp = std::chrono::sys_seconds;

/// Parses an ISO-8601 date-time with an explicit offset ("Z", "+hh:mm",
/// "+hhmm") and converts it to UTC. Fractional seconds are discarded.
/// A bare date ("2011-01-15") is read as midnight UTC.
/// Throws InputError on anything else, including offset-less date-times.
Timestamp parse_timestamp(std::string_view text);

/// "2011-01-15T12:00:00Z"
std::string format_timestamp(Timestamp t);

/// A UTC calendar month as a dense integer: year * 12 + (month - 1).
class MonthIndex {
 public:
  constexpr MonthIndex() = default;
  constexpr explicit MonthIndex(int value) : value_(value) {}
  constexpr MonthIndex(int year, unsigned month) : value_(year * 12 + static_cast<int>(month) - 1) {}

  constexpr int value() const { return value_; }
  constexpr int year() const { return floor_div(value_, 12); }
  constexpr unsigned month() const { return static_cast<unsigned>(value_ - year() * 12 + 1); }

  constexpr MonthIndex operator+(int n) const { return MonthIndex(value_ + n); }
  constexpr MonthIndex operator-(int n) const { return MonthIndex(value_ - n); }
  constexpr int operator-(MonthIndex other) const { return value_ - other.value_; }
  constexpr MonthIndex& operator++() {
    ++value_;
    return *this;
  }

  constexpr auto operator<=>(const MonthIndex&) const = default;

 private:
  static constexpr int floor_div(int a, int b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }

  int value_ = 0;
};

MonthIndex month_of(Timestamp t);

/// First instant of the month.
Timestamp month_start(MonthIndex m);

/// "YYYY-MM"
std::string format_month(MonthIndex m);

/// Accepts "YYYY-MM". Throws InputError otherwise.
MonthIndex parse_month(std::string_view text);

}  // namespace vitals
