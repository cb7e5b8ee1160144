#pragma once

#include <chrono>
#include <string>

namespace snotes {

/// Civil calendar date. All date arithmetic in the library is calendar-day
/// based; the only business-day convention is a weekend-only calendar
/// (Saturday/Sunday closed, no exchange holidays).
using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 date ("YYYY-MM-DD").
/// Throws std::invalid_argument on malformed text or impossible dates.
Date parse_date(const std::string& text);

std::string to_iso_string(Date date);

bool is_weekend(Date date);

/// Walks `count` business days backward from `date` (weekend-only calendar).
/// The starting date itself is not counted, so count=0 returns `date`.
Date business_days_before(Date date, int count);

/// Calendar days from a to b (negative when b precedes a).
long days_between(Date a, Date b);

Date add_calendar_days(Date date, long n);

/// date + n calendar years; a nominal Feb 29 target lands on the last day
/// of February.
Date add_years(Date date, int n);

}  // namespace snotes
