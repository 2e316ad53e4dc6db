#include "crashstat/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "crashstat/errors.hpp"

namespace crashstat {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        if (comma == std::string::npos) {
            fields.push_back(trim(std::string_view(line).substr(pos)));
            break;
        }
        fields.push_back(trim(std::string_view(line).substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return fields;
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

std::optional<double> parse_close(const std::string& field) {
    if (field.empty()) return std::nullopt;
    double value = 0.0;
    const char* first = field.data();
    const char* last = first + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
    return value;
}

}  // namespace

PriceSeries::PriceSeries(std::string ticker, std::vector<Date> dates, std::vector<double> closes)
    : ticker_(std::move(ticker)), dates_(std::move(dates)), closes_(std::move(closes)) {
    if (dates_.size() != closes_.size()) {
        throw InputError("price series: " + std::to_string(dates_.size()) + " dates vs " +
                         std::to_string(closes_.size()) + " closes");
    }
    if (dates_.empty()) {
        throw InputError("price series: no observations");
    }
    for (std::size_t i = 0; i < dates_.size(); ++i) {
        if (!(closes_[i] > 0.0) || !std::isfinite(closes_[i])) {
            throw InputError("price series: non-positive close at " + format_date(dates_[i]));
        }
        if (i > 0 && dates_[i] <= dates_[i - 1]) {
            throw InputError("price series: dates not strictly increasing at " +
                             format_date(dates_[i]));
        }
    }
}

std::optional<std::size_t> PriceSeries::index_of(Date d) const {
    const auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
    if (it == dates_.end() || *it != d) return std::nullopt;
    return static_cast<std::size_t>(it - dates_.begin());
}

std::size_t PriceSeries::lower_bound(Date d) const {
    return static_cast<std::size_t>(std::lower_bound(dates_.begin(), dates_.end(), d) -
                                    dates_.begin());
}

CsvLoadResult load_csv(const std::filesystem::path& path, const CsvSchema& schema,
                       std::string ticker) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw InputError("empty file " + path.string());
    }
    const auto header = split_csv_line(line);
    std::size_t date_col = header.size();
    std::size_t close_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (iequals(header[i], schema.date_column)) date_col = i;
        if (iequals(header[i], schema.close_column)) close_col = i;
    }
    if (date_col == header.size()) {
        throw InputError("no '" + schema.date_column + "' column in " + path.string());
    }
    if (close_col == header.size()) {
        throw InputError("no '" + schema.close_column + "' column in " + path.string());
    }

    std::vector<std::pair<Date, double>> rows;
    std::size_t dropped = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() <= std::max(date_col, close_col)) {
            ++dropped;
            continue;
        }
        Date d;
        try {
            d = parse_date(fields[date_col]);
        } catch (const InputError&) {
            ++dropped;
            continue;
        }
        const auto close = parse_close(fields[close_col]);
        if (!close || *close <= 0.0) {
            ++dropped;
            continue;
        }
        rows.emplace_back(d, *close);
    }
    if (rows.empty()) {
        throw InputError("no parseable rows in " + path.string());
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].first == rows[i - 1].first) {
            throw InputError("duplicate date " + format_date(rows[i].first) + " in " +
                             path.string());
        }
    }
    std::vector<Date> dates(rows.size());
    std::vector<double> closes(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        dates[i] = rows[i].first;
        closes[i] = rows[i].second;
    }
    if (ticker.empty()) ticker = path.stem().string();
    return CsvLoadResult{PriceSeries(std::move(ticker), std::move(dates), std::move(closes)),
                         dropped};
}

void save_csv(const PriceSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    out << "date,close\n";
    char buf[32];
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto r = std::to_chars(buf, buf + sizeof buf, series.close(i));
        out << format_date(series.date(i)) << ',' << std::string_view(buf, r.ptr - buf) << '\n';
    }
    if (!out) {
        throw InputError("write failed for " + path.string());
    }
}

ReturnSeries log_returns(const PriceSeries& series) {
    if (series.size() < 2) {
        throw InfeasibleError("log returns need at least 2 observations");
    }
    ReturnSeries out;
    out.dates.reserve(series.size() - 1);
    out.values.reserve(series.size() - 1);
    for (std::size_t i = 1; i < series.size(); ++i) {
        out.dates.push_back(series.date(i));
        out.values.push_back(std::log10(series.close(i) / series.close(i - 1)));
    }
    return out;
}

PriceSeries slice(const PriceSeries& series, Date start, Date end) {
    if (start > end) {
        throw InputError("slice start after end");
    }
    const std::size_t lo = series.lower_bound(start);
    std::size_t hi = lo;
    while (hi < series.size() && series.date(hi) <= end) ++hi;
    if (lo == hi) {
        throw InfeasibleError("no observations in [" + format_date(start) + ", " +
                              format_date(end) + "]");
    }
    std::vector<Date> dates(series.dates().begin() + lo, series.dates().begin() + hi);
    std::vector<double> closes(series.closes().begin() + lo, series.closes().begin() + hi);
    return PriceSeries(series.ticker(), std::move(dates), std::move(closes));
}

}  // namespace crashstat
