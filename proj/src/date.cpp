#include "crashstat/date.hpp"

#include <charconv>
#include <cstdio>

#include "crashstat/errors.hpp"

namespace crashstat {

namespace {

int parse_int_field(std::string_view text, std::size_t pos, std::size_t len) {
    int value = 0;
    const char* first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len) {
        throw InputError("bad date field in '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw InputError("expected YYYY-MM-DD date, got '" + std::string(text) + "'");
    }
    const int y = parse_int_field(text, 0, 4);
    const int m = parse_int_field(text, 5, 2);
    const int d = parse_int_field(text, 8, 2);
    return make_date(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

Date make_date(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
        throw InputError(std::string("impossible calendar date ") + buf);
    }
    return Date{ymd};
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
}

DateRange parse_date_range(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw InputError("expected START:END date range, got '" + std::string(text) + "'");
    }
    DateRange r{parse_date(text.substr(0, colon)), parse_date(text.substr(colon + 1))};
    if (r.start > r.end) {
        throw InputError("date range start after end: '" + std::string(text) + "'");
    }
    return r;
}

bool is_weekday(Date d) {
    const std::chrono::weekday wd{d};
    return wd != std::chrono::Saturday && wd != std::chrono::Sunday;
}

std::vector<Date> weekday_calendar(Date start, std::size_t n) {
    std::vector<Date> out;
    out.reserve(n);
    Date d = start;
    while (!is_weekday(d)) d += std::chrono::days{1};
    while (out.size() < n) {
        out.push_back(d);
        d += std::chrono::days{1};
        while (!is_weekday(d)) d += std::chrono::days{1};
    }
    return out;
}

}  // namespace crashstat
