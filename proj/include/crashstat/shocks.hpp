#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crashstat/market_data.hpp"

namespace crashstat {

/// One maximal run of strictly decreasing consecutive daily closes.
///
/// start_date is the local peak (last close before the decline), end_date the
/// trough. magnitude = log10(peak/trough) and pct_fall = 1 - trough/peak are
/// computed independently; they satisfy pct_fall = 1 - 10^(-magnitude) to
/// float round-off by construction. duration_days counts declining trading
/// days, so it equals end_index - start_index >= 1.
struct Shock {
    Date start_date;
    Date end_date;
    double peak_price = 0.0;
    double trough_price = 0.0;
    int duration_days = 0;
    double magnitude = 0.0;
    double pct_fall = 0.0;
    std::size_t start_index = 0;  // peak position in the source series
    std::size_t end_index = 0;    // trough position
};

/// Mainshock plus the aftershocks inside its influence window.
struct CrisisWindow {
    Shock mainshock;
    Date window_start;
    Date window_end;
    bool open_ended = false;
    std::vector<Shock> aftershocks;  // date-ordered, spans non-overlapping
};

/// Every maximal strictly-decreasing run of closes, in date order. An equal
/// close terminates a run. Throws InfeasibleError if the series has fewer
/// than 2 observations.
std::vector<Shock> detect_shocks(const PriceSeries& series);

/// The maximum-magnitude shock, ties broken by earliest start_date. The
/// optional window restricts candidates to start_date within it. Throws
/// InfeasibleError when no shock qualifies.
Shock identify_mainshock(std::span<const Shock> shocks,
                         std::optional<DateRange> search_window = std::nullopt);

/// Shocks after the mainshock with start_date <= window_end and magnitude at
/// least threshold_ratio * mainshock.magnitude (inclusive, with 1e-9 relative
/// slack so the boundary is robust to binary rounding of the product).
/// The mainshock itself is excluded. An empty result is valid.
std::vector<Shock> filter_aftershocks(std::span<const Shock> shocks, const Shock& mainshock,
                                      Date window_end, double threshold_ratio = 0.07);

/// CSV with header start_date,end_date,peak,trough,duration,magnitude,pct_fall.
std::string shocks_to_csv(std::span<const Shock> shocks);

/// JSON array with the same fields as the CSV.
std::string shocks_to_json(std::span<const Shock> shocks);

}  // namespace crashstat
