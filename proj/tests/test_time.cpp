#include <doctest.h>

#include "vitals/errors.hpp"
#include "vitals/time.hpp"

using namespace vitals;

TEST_CASE("parse_timestamp normalizes offsets to UTC") {
  CHECK(format_timestamp(parse_timestamp("2011-01-15T12:00:00Z")) == "2011-01-15T12:00:00Z");
  CHECK(format_timestamp(parse_timestamp("2011-01-15T13:00:00+01:00")) == "2011-01-15T12:00:00Z");
  CHECK(format_timestamp(parse_timestamp("2011-01-15T07:00:00-0500")) == "2011-01-15T12:00:00Z");
  CHECK(format_timestamp(parse_timestamp("2011-01-01T00:30:00+01:00")) == "2010-12-31T23:30:00Z");
  CHECK(format_timestamp(parse_timestamp("2011-01-15")) == "2011-01-15T00:00:00Z");
}

TEST_CASE("parse_timestamp truncates sub-second precision") {
  CHECK(parse_timestamp("2011-01-15T12:00:00.999Z") == parse_timestamp("2011-01-15T12:00:00Z"));
}

TEST_CASE("parse_timestamp rejects local and malformed instants") {
  CHECK_THROWS_AS(parse_timestamp("2011-01-15T12:00:00"), InputError);
  CHECK_THROWS_AS(parse_timestamp("2011-02-30T12:00:00Z"), InputError);
  CHECK_THROWS_AS(parse_timestamp("2011-1-15T12:00:00Z"), InputError);
  CHECK_THROWS_AS(parse_timestamp("yesterday"), InputError);
  CHECK_THROWS_AS(parse_timestamp("2011-01-15T12:00:00Zjunk"), InputError);
  CHECK_THROWS_AS(parse_timestamp(""), InputError);
}

TEST_CASE("month_of bins by UTC calendar month") {
  CHECK(month_of(parse_timestamp("2010-10-15T12:00:00Z")) == MonthIndex(2010, 10));
  CHECK(month_of(parse_timestamp("2011-01-31T23:59:59Z")) == MonthIndex(2011, 1));
  CHECK(month_of(parse_timestamp("2011-02-01T00:00:00Z")) == MonthIndex(2011, 2));
  CHECK(MonthIndex(2011, 1) - MonthIndex(2010, 12) == 1);
  CHECK(MonthIndex(2011, 1).value() == 2011 * 12);
}

TEST_CASE("month_of is monotone across a year of hourly instants") {
  auto t = parse_timestamp("2010-12-01T00:00:00Z");
  auto previous = month_of(t);
  for (int h = 0; h < 24 * 400; ++h) {
    t += std::chrono::hours(1);
    auto m = month_of(t);
    REQUIRE(m >= previous);
    REQUIRE(m - previous <= 1);
    previous = m;
  }
}

TEST_CASE("MonthIndex arithmetic and formatting") {
  MonthIndex dec(2010, 12);
  CHECK((dec + 1).year() == 2011);
  CHECK((dec + 1).month() == 1u);
  CHECK(format_month(dec) == "2010-12");
  CHECK(parse_month("2011-03") == MonthIndex(2011, 3));
  CHECK(month_start(MonthIndex(2011, 3)) == parse_timestamp("2011-03-01T00:00:00Z"));
  CHECK_THROWS_AS(parse_month("2011-13"), InputError);
  CHECK_THROWS_AS(parse_month("2011/03"), InputError);
  CHECK_THROWS_AS(parse_month("201103"), InputError);
}
