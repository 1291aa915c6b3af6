#include "vitals/time.hpp"

#include <cctype>
#include <charconv>

#include <fmt/format.h>

#include "vitals/errors.hpp"

namespace vitals {

namespace {

using namespace std::chrono;

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool done() const { return pos_ == text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }

  int digits(std::size_t count) {
    if (pos_ + count > text_.size()) fail();
    int value = 0;
    auto first = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, first + count, value);
    if (ec != std::errc{} || ptr != first + count) fail();
    pos_ += count;
    return value;
  }

  void expect(char c) {
    if (peek() != c) fail();
    ++pos_;
  }

  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail() const { throw InputError(fmt::format("invalid ISO-8601 timestamp '{}'", text_)); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  Cursor in(text);
  int y = in.digits(4);
  in.expect('-');
  int mo = in.digits(2);
  in.expect('-');
  int d = in.digits(2);
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) in.fail();
  if (in.done()) return sys_days{ymd};

  if (!in.accept('T') && !in.accept(' ')) in.fail();
  int hh = in.digits(2);
  in.expect(':');
  int mm = in.digits(2);
  in.expect(':');
  int ss = in.digits(2);
  if (hh > 23 || mm > 59 || ss > 60) in.fail();
  if (in.accept('.')) {
    if (!std::isdigit(static_cast<unsigned char>(in.peek()))) in.fail();
    while (std::isdigit(static_cast<unsigned char>(in.peek()))) in.digits(1);
  }

  seconds offset{0};
  if (in.accept('Z') || in.accept('z')) {
  } else if (in.peek() == '+' || in.peek() == '-') {
    int sign = in.peek() == '-' ? -1 : 1;
    in.accept(in.peek());
    int oh = in.digits(2);
    in.accept(':');
    int om = in.digits(2);
    if (oh > 23 || om > 59) in.fail();
    offset = sign * (hours{oh} + minutes{om});
  } else {
    in.fail();
  }
  if (!in.done()) in.fail();

  auto local = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
  return local - offset;
}

std::string format_timestamp(Timestamp t) {
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  hh_mm_ss hms{t - day_point};
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

MonthIndex month_of(Timestamp t) {
  year_month_day ymd{floor<days>(t)};
  return MonthIndex(static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()));
}

Timestamp month_start(MonthIndex m) {
  return sys_days{year{m.year()} / month{m.month()} / day{1}};
}

std::string format_month(MonthIndex m) { return fmt::format("{:04d}-{:02d}", m.year(), m.month()); }

MonthIndex parse_month(std::string_view text) {
  auto fail = [&] { return InputError(fmt::format("invalid month '{}', expected YYYY-MM", text)); };
  if (text.size() != 7 || text[4] != '-') throw fail();
  int y = 0;
  unsigned mo = 0;
  auto r1 = std::from_chars(text.data(), text.data() + 4, y);
  auto r2 = std::from_chars(text.data() + 5, text.data() + 7, mo);
  if (r1.ec != std::errc{} || r1.ptr != text.data() + 4 || r2.ec != std::errc{} ||
      r2.ptr != text.data() + 7 || mo < 1 || mo > 12)
    throw fail();
  return MonthIndex(y, mo);
}

}  // namespace vitals
