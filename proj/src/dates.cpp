#include "snotes/dates.hpp"

#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace snotes {

namespace {

bool all_digits(const std::string& text, std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
  }
  return true;
}

}  // namespace

Date parse_date(const std::string& text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
      !all_digits(text, 0, 4) || !all_digits(text, 5, 7) || !all_digits(text, 8, 10)) {
    throw std::invalid_argument("expected ISO date YYYY-MM-DD, got '" + text + "'");
  }
  int y = std::stoi(text.substr(0, 4));
  unsigned m = static_cast<unsigned>(std::stoi(text.substr(5, 2)));
  unsigned d = static_cast<unsigned>(std::stoi(text.substr(8, 2)));
  Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) {
    throw std::invalid_argument("not a real calendar date: '" + text + "'");
  }
  return date;
}

std::string to_iso_string(Date date) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

bool is_weekend(Date date) {
  std::chrono::weekday wd{std::chrono::sys_days{date}};
  return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

Date business_days_before(Date date, int count) {
  if (count < 0) throw std::invalid_argument("business day count must be >= 0");
  std::chrono::sys_days cursor{date};
  while (count > 0) {
    cursor -= std::chrono::days{1};
    if (!is_weekend(Date{cursor})) --count;
  }
  return Date{cursor};
}

long days_between(Date a, Date b) {
  return (std::chrono::sys_days{b} - std::chrono::sys_days{a}).count();
}

Date add_calendar_days(Date date, long n) {
  return Date{std::chrono::sys_days{date} + std::chrono::days{n}};
}

Date add_years(Date date, int n) {
  Date shifted{date.year() + std::chrono::years{n}, date.month(), date.day()};
  if (!shifted.ok()) {
    // Only Feb 29 can break; land on the last day of February.
    shifted = Date{shifted.year() / shifted.month() / std::chrono::last};
  }
  return shifted;
}

}  // namespace snotes
