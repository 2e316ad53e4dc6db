#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

namespace crashstat {

/// Calendar date, day resolution, no time zone.
using Date = std::chrono::sys_days;

/// Parses YYYY-MM-DD. Throws InputError on malformed text or impossible dates.
Date parse_date(std::string_view text);

/// Formats as YYYY-MM-DD.
std::string format_date(Date d);

/// Checked construction; throws InputError on impossible dates.
Date make_date(int year, unsigned month, unsigned day);

/// Inclusive date range.
struct DateRange {
    Date start;
    Date end;

    bool contains(Date d) const { return d >= start && d <= end; }
};

/// Parses "YYYY-MM-DD:YYYY-MM-DD". Throws InputError if malformed or start > end.
DateRange parse_date_range(std::string_view text);

bool is_weekday(Date d);

/// n consecutive weekdays starting at the first weekday >= start.
/// Stand-in trading calendar for synthetic series (no holiday table).
std::vector<Date> weekday_calendar(Date start, std::size_t n);

}  // namespace crashstat
