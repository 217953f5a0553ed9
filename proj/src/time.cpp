#include "camwatch/time.hpp"

#include <charconv>

#include <fmt/format.h>

#include "camwatch/error.hpp"

namespace camwatch {
namespace {

using namespace std::chrono;

int parse_fixed(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
  if (pos + len > text.size()) throw InvalidInput(fmt::format("truncated timestamp '{}'", whole));
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (text[i] < '0' || text[i] > '9') throw InvalidInput(fmt::format("malformed timestamp '{}'", whole));
    value = value * 10 + (text[i] - '0');
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c, std::string_view whole) {
  if (pos >= text.size() || text[pos] != c) throw InvalidInput(fmt::format("malformed timestamp '{}'", whole));
}

Date checked_date(int y, int m, int d, std::string_view whole) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw InvalidInput(fmt::format("invalid calendar date '{}'", whole));
  return sys_days{ymd};
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10) throw InvalidInput(fmt::format("expected YYYY-MM-DD, got '{}'", text));
  const int y = parse_fixed(text, 0, 4, text);
  expect(text, 4, '-', text);
  const int m = parse_fixed(text, 5, 2, text);
  expect(text, 7, '-', text);
  const int d = parse_fixed(text, 8, 2, text);
  return checked_date(y, m, d, text);
}

Timestamp parse_rfc3339(std::string_view text) {
  if (text.size() < 20) throw InvalidInput(fmt::format("malformed timestamp '{}'", text));
  const Date date = parse_date(text.substr(0, 10));
  if (text[10] != 'T' && text[10] != 't' && text[10] != ' ') throw InvalidInput(fmt::format("malformed timestamp '{}'", text));
  const int hh = parse_fixed(text, 11, 2, text);
  expect(text, 13, ':', text);
  const int mm = parse_fixed(text, 14, 2, text);
  expect(text, 16, ':', text);
  const int ss = parse_fixed(text, 17, 2, text);
  if (hh > 23 || mm > 59 || ss > 60) throw InvalidInput(fmt::format("time of day out of range in '{}'", text));

  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == start) throw InvalidInput(fmt::format("empty fractional seconds in '{}'", text));
  }
  if (pos >= text.size()) throw InvalidInput(fmt::format("missing UTC offset in '{}'", text));

  seconds offset{0};
  const char zone = text[pos];
  if (zone == 'Z' || zone == 'z') {
    ++pos;
  } else if (zone == '+' || zone == '-') {
    const int oh = parse_fixed(text, pos + 1, 2, text);
    expect(text, pos + 3, ':', text);
    const int om = parse_fixed(text, pos + 4, 2, text);
    offset = hours{oh} + minutes{om};
    if (zone == '-') offset = -offset;
    pos += 6;
  } else {
    throw InvalidInput(fmt::format("malformed UTC offset in '{}'", text));
  }
  if (pos != text.size()) throw InvalidInput(fmt::format("trailing characters in '{}'", text));

  return Timestamp{date} + hours{hh} + minutes{mm} + seconds{ss} - offset;
}

std::string format_date(Date d) {
  const year_month_day ymd{d};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()));
}

Date date_of(Timestamp t) { return floor<days>(t); }

std::string format_hms(Timestamp t) {
  const hh_mm_ss tod{t - date_of(t)};
  return fmt::format("{:02d}{:02d}{:02d}", tod.hours().count(), tod.minutes().count(), tod.seconds().count());
}

std::string format_rfc3339(Timestamp t) {
  const hh_mm_ss tod{t - date_of(t)};
  return fmt::format("{}T{:02d}:{:02d}:{:02d}Z", format_date(date_of(t)), tod.hours().count(), tod.minutes().count(),
                     tod.seconds().count());
}

Timestamp now_utc() { return floor<seconds>(system_clock::now()); }

}  // namespace camwatch
