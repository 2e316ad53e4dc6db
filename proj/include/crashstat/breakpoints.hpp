#pragma once

#include <span>
#include <vector>

#include "crashstat/market_data.hpp"
#include "crashstat/shocks.hpp"

namespace crashstat {

/// Constant-mean fit diagnostics for one segment.
struct SegmentStats {
    int start_index = 0;
    int end_index = 0;
    double ssr = 0.0;
    double mean = 0.0;
};

/// O(1) segment SSR queries after O(n) prefix-sum precomputation.
///
/// ssr(i, j) is the sum of squared residuals of a constant mean fitted to
/// y[i..j] inclusive: sum(y^2) - (sum(y))^2 / n over the segment. Immutable
/// after construction, safe to query concurrently.
class SsrTable {
public:
    /// Requires h_min >= 1 and y.size() >= 2 * h_min.
    SsrTable(std::span<const double> y, int h_min);

    double ssr(int i, int j) const;
    double mean(int i, int j) const;
    SegmentStats stats(int i, int j) const;

    int size() const { return static_cast<int>(prefix_.size()) - 1; }
    int min_segment() const { return h_min_; }

private:
    std::vector<double> prefix_;     // prefix_[k] = sum of y[0..k)
    std::vector<double> prefix_sq_;  // prefix_sq_[k] = sum of y[0..k)^2
    int h_min_;
};

/// Optimal m-break partition of a series under the piecewise-constant-mean
/// least-squares objective.
///
/// break_indices[k] is the last index of segment k (the boundary lies between
/// it and the next observation). per_m_ssr[j] is the minimal total SSR using
/// j breaks, for j = 0..m; total_ssr == per_m_ssr[m]. break_dates is filled
/// by callers holding a dated series. open_ended is set by influence-window
/// selection when no break follows the mainshock.
struct BreakResult {
    int m = 0;
    std::vector<int> break_indices;
    std::vector<Date> break_dates;
    double total_ssr = 0.0;
    std::vector<double> per_m_ssr;
    bool open_ended = false;
};

/// Globally optimal partition of y into m+1 segments of length >= h_min,
/// minimizing the summed segment SSRs by dynamic programming over the
/// segment-SSR table. Ties resolve to the lexicographically smallest
/// break-index vector. Throws InfeasibleError when (m+1)*h_min > n.
BreakResult optimal_partition(std::span<const double> y, int m, int h_min);

/// Influence window of a mainshock, bounded by structural breaks.
struct InfluenceWindow {
    Date window_start;
    Date window_end;
    bool open_ended = false;
    BreakResult breaks;
};

/// Runs optimal_partition on the close series (or log10 closes) with
/// h_min = max(2, round(h_min_fraction * n)). window_start is the break date
/// nearest the mainshock start (earlier break wins ties); window_end is the
/// earliest break after it, or the last series date flagged open_ended when
/// none follows. Throws InfeasibleError when the break estimation is
/// infeasible or when no break lies within 25% of the series length of the
/// mainshock start (the crash is not the dominant structure).
InfluenceWindow influence_window(const PriceSeries& series, const Shock& mainshock, int m = 3,
                                 double h_min_fraction = 0.10, bool log_price = false);

/// JSON object {m, break_dates[], total_ssr, per_m_ssr[], open_ended}.
std::string break_result_to_json(const BreakResult& result);

}  // namespace crashstat
