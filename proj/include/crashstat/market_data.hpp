#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crashstat/date.hpp"

namespace crashstat {

/// Dated daily closing prices for one instrument.
///
/// Invariants, checked at construction: dates strictly increasing (hence no
/// duplicates), every close > 0, at least one observation. Missing trading
/// days are simply absent rows; there is no calendar interpolation.
/// Immutable after construction, safe to share across threads.
class PriceSeries {
public:
    PriceSeries(std::string ticker, std::vector<Date> dates, std::vector<double> closes);

    const std::string& ticker() const { return ticker_; }
    std::span<const Date> dates() const { return dates_; }
    std::span<const double> closes() const { return closes_; }
    std::size_t size() const { return dates_.size(); }

    Date date(std::size_t i) const { return dates_[i]; }
    double close(std::size_t i) const { return closes_[i]; }
    Date first_date() const { return dates_.front(); }
    Date last_date() const { return dates_.back(); }

    /// Index of an exact date, if present.
    std::optional<std::size_t> index_of(Date d) const;

    /// Index of the first observation with date >= d (== size() if none).
    std::size_t lower_bound(Date d) const;

private:
    std::string ticker_;
    std::vector<Date> dates_;
    std::vector<double> closes_;
};

/// Base-10 log returns, one value per consecutive close pair, dated by the
/// later day: values[i] = log10(close[i+1] / close[i]).
struct ReturnSeries {
    std::vector<Date> dates;
    std::vector<double> values;
};

/// Names of the date and close columns in an input CSV. Defaults match the
/// canonical format; map Yahoo-style exports with {"Date", "Close"} or
/// {"Date", "Adj Close"}. Matching is case-insensitive.
struct CsvSchema {
    std::string date_column = "date";
    std::string close_column = "close";
};

struct CsvLoadResult {
    PriceSeries series;
    std::size_t rows_dropped = 0;  // rows with missing/zero/negative/unparseable fields
};

/// Loads a close series from CSV, sorted by date. Rows whose close is
/// missing, zero, negative, or unparseable are dropped and counted.
/// Throws InputError on unreadable files, missing schema columns, no
/// parseable rows, or duplicate dates (corrupt input).
/// Ticker defaults to the file stem.
CsvLoadResult load_csv(const std::filesystem::path& path, const CsvSchema& schema = {},
                       std::string ticker = "");

/// Writes the canonical CSV: header "date,close", YYYY-MM-DD dates, closes in
/// shortest round-trip decimal form, UTF-8, LF line endings. load_csv of the
/// output reproduces the series bit-compatibly.
void save_csv(const PriceSeries& series, const std::filesystem::path& path);

/// Throws InfeasibleError if the series has fewer than 2 observations.
ReturnSeries log_returns(const PriceSeries& series);

/// Sub-series with start <= date <= end. Throws InputError if start > end,
/// InfeasibleError if the window contains no observations.
PriceSeries slice(const PriceSeries& series, Date start, Date end);

}  // namespace crashstat
