#include "crashstat/breakpoints.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include <nlohmann/json.hpp>

#include "crashstat/errors.hpp"

namespace crashstat {

SsrTable::SsrTable(std::span<const double> y, int h_min) : h_min_(h_min) {
    if (h_min < 1) {
        throw InputError("h_min must be >= 1");
    }
    if (y.size() < 2 * static_cast<std::size_t>(h_min)) {
        throw InfeasibleError("series of length " + std::to_string(y.size()) +
                              " too short for minimum segment length " + std::to_string(h_min));
    }
    prefix_.resize(y.size() + 1, 0.0);
    prefix_sq_.resize(y.size() + 1, 0.0);
    for (std::size_t k = 0; k < y.size(); ++k) {
        prefix_[k + 1] = prefix_[k] + y[k];
        prefix_sq_[k + 1] = prefix_sq_[k] + y[k] * y[k];
    }
}

double SsrTable::ssr(int i, int j) const {
    const double sum = prefix_[j + 1] - prefix_[i];
    const double sum_sq = prefix_sq_[j + 1] - prefix_sq_[i];
    const double n = static_cast<double>(j - i + 1);
    // Cancellation can leave a tiny negative residue on constant segments.
    return std::max(0.0, sum_sq - sum * sum / n);
}

double SsrTable::mean(int i, int j) const {
    return (prefix_[j + 1] - prefix_[i]) / static_cast<double>(j - i + 1);
}

SegmentStats SsrTable::stats(int i, int j) const {
    return SegmentStats{i, j, ssr(i, j), mean(i, j)};
}

BreakResult optimal_partition(std::span<const double> y, int m, int h_min) {
    const int n = static_cast<int>(y.size());
    if (m < 0) {
        throw InputError("number of breaks must be >= 0");
    }
    if (h_min < 1) {
        throw InputError("h_min must be >= 1");
    }
    if ((m + 1) * h_min > n) {
        throw InfeasibleError("cannot place " + std::to_string(m) + " breaks with minimum "
                              "segment length " + std::to_string(h_min) + " in " +
                              std::to_string(n) + " observations");
    }

    // The DP enforces segment admissibility itself; the table is storage.
    const SsrTable table(y, 1);

    // suffix[r][i]: minimal SSR of y[i..n-1] split into r segments, each of
    // length >= h_min. The recursion peels the first segment, so candidate
    // costs associate as ssr(i,k) + (ssr(k+1,.) + (...)); the brute-force
    // reference accumulates identically, which keeps optimal values and the
    // lexicographic tie-break bit-exact between the two.
    const int max_segments = m + 1;
    std::vector<std::vector<double>> suffix(max_segments + 1,
                                            std::vector<double>(n + 1, 0.0));
    std::vector<std::vector<int>> first_end(max_segments + 1, std::vector<int>(n + 1, -1));

    for (int i = 0; i + h_min <= n; ++i) {
        suffix[1][i] = table.ssr(i, n - 1);
    }
    for (int r = 2; r <= max_segments; ++r) {
        for (int i = 0; i + r * h_min <= n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_k = -1;
            const int k_lo = i + h_min - 1;
            const int k_hi = n - (r - 1) * h_min - 1;
            for (int k = k_lo; k <= k_hi; ++k) {
                const double cost = table.ssr(i, k) + suffix[r - 1][k + 1];
                if (cost < best) {
                    best = cost;
                    best_k = k;
                }
            }
            suffix[r][i] = best;
            first_end[r][i] = best_k;
        }
    }

    BreakResult result;
    result.m = m;
    result.per_m_ssr.reserve(max_segments);
    for (int r = 1; r <= max_segments; ++r) {
        result.per_m_ssr.push_back(suffix[r][0]);
    }
    result.total_ssr = suffix[max_segments][0];
    result.break_indices.reserve(m);
    int i = 0;
    for (int r = max_segments; r >= 2; --r) {
        const int k = first_end[r][i];
        result.break_indices.push_back(k);
        i = k + 1;
    }
    return result;
}

InfluenceWindow influence_window(const PriceSeries& series, const Shock& mainshock, int m,
                                 double h_min_fraction, bool log_price) {
    const auto start_idx = series.index_of(mainshock.start_date);
    if (!start_idx || series.close(*start_idx) != mainshock.peak_price) {
        throw InputError("mainshock does not lie within the series");
    }
    const int n = static_cast<int>(series.size());
    const int h_min = std::max(2, static_cast<int>(std::llround(h_min_fraction * n)));

    std::vector<double> y(series.closes().begin(), series.closes().end());
    if (log_price) {
        for (double& v : y) v = std::log10(v);
    }
    BreakResult breaks = optimal_partition(y, m, h_min);
    breaks.break_dates.reserve(breaks.break_indices.size());
    for (int k : breaks.break_indices) {
        breaks.break_dates.push_back(series.date(k));
    }

    const int s = static_cast<int>(*start_idx);
    int nearest = -1;
    long best_dist = std::numeric_limits<long>::max();
    for (int k : breaks.break_indices) {
        const long dist = std::labs(static_cast<long>(k) - s);
        if (dist < best_dist) {
            best_dist = dist;
            nearest = k;
        }
    }
    if (nearest < 0 || best_dist > static_cast<long>(std::llround(0.25 * n))) {
        throw InfeasibleError(
            "no structural break within 25% of the series length of the mainshock; "
            "the crash is not the dominant structure (widen the data range)");
    }

    InfluenceWindow window;
    window.window_start = series.date(nearest);
    window.window_end = series.last_date();
    window.open_ended = true;
    for (int k : breaks.break_indices) {
        if (k > nearest) {
            window.window_end = series.date(k);
            window.open_ended = false;
            break;
        }
    }
    breaks.open_ended = window.open_ended;
    window.breaks = std::move(breaks);
    return window;
}

std::string break_result_to_json(const BreakResult& result) {
    nlohmann::ordered_json j;
    j["m"] = result.m;
    auto dates = nlohmann::ordered_json::array();
    for (const Date& d : result.break_dates) dates.push_back(format_date(d));
    j["break_dates"] = std::move(dates);
    j["break_indices"] = result.break_indices;
    j["total_ssr"] = result.total_ssr;
    j["per_m_ssr"] = result.per_m_ssr;
    j["open_ended"] = result.open_ended;
    return j.dump(2);
}

}  // namespace crashstat
