#pragma once

#include <span>
#include <string>
#include <vector>

#include "crashstat/date.hpp"
#include "crashstat/shocks.hpp"

namespace crashstat {

/// One point of the cumulative magnitude-frequency curve: count is the number
/// of events with magnitude >= this one.
struct GrPoint {
    double magnitude = 0.0;
    long long count = 0;
    double log_count = 0.0;  // log10(count)
};

/// Cumulative exceedance counts, points ordered by increasing magnitude.
/// By default one point per distinct magnitude; per_event emits one point per
/// event instead (duplicated magnitudes repeat with their shared count).
/// Throws InputError on empty input or non-positive magnitudes.
std::vector<GrPoint> cumulative_counts(std::span<const double> magnitudes,
                                       bool per_event = false);

/// Least-squares line log10(N) = alpha - beta * M through the exceedance
/// points, with the points retained for reporting.
struct GrFit {
    double alpha = 0.0;
    double beta = 0.0;
    double r_squared = 0.0;
    bool nonpositive_beta = false;  // pathological but reportable
    std::vector<GrPoint> points;

    double fitted_log_count(double magnitude) const { return alpha - beta * magnitude; }
};

/// OLS of log_count on magnitude. Requires >= 3 points spanning >= 2 distinct
/// magnitudes (InfeasibleError otherwise). A non-positive slope magnitude is
/// returned flagged, not treated as an error.
GrFit fit_gr(std::vector<GrPoint> points);

/// Aftershock counts per consecutive trading-day bin.
struct RateSeries {
    std::vector<Date> bin_start_dates;
    std::vector<int> counts;
    int bin_width_days = 0;
    bool last_bin_partial = false;
};

/// Bins aftershocks by start_date into consecutive bins of bin_width_days
/// trading days covering the window. calendar supplies the trading days (the
/// price series dates). Aftershocks outside the window are ignored; empty
/// bins count zero. Throws InputError on bin_width_days < 1, InfeasibleError
/// when the window contains no trading days.
RateSeries temporal_rate(std::span<const Shock> aftershocks, std::span<const Date> calendar,
                         DateRange window, int bin_width_days);

/// Two-column CSV (magnitude,count,log10_count) for external plotting.
std::string gr_points_to_csv(std::span<const GrPoint> points);

/// JSON object {alpha, beta, r_squared, n_points, flags[]}.
std::string gr_fit_to_json(const GrFit& fit);

}  // namespace crashstat
