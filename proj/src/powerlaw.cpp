#include "crashstat/powerlaw.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crashstat/errors.hpp"

namespace crashstat {

std::vector<GrPoint> cumulative_counts(std::span<const double> magnitudes, bool per_event) {
    if (magnitudes.empty()) {
        throw InputError("no magnitudes");
    }
    std::vector<double> sorted(magnitudes.begin(), magnitudes.end());
    for (double m : sorted) {
        if (!(m > 0.0) || !std::isfinite(m)) {
            throw InputError("magnitudes must be positive");
        }
    }
    std::sort(sorted.begin(), sorted.end());

    // Ascending order: everything at or above sorted[i] is the tail n - i,
    // and duplicates share the count of their first (lowest-index) entry.
    const std::size_t n = sorted.size();
    std::vector<GrPoint> points;
    points.reserve(per_event ? n : n / 2 + 1);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
        const auto count = static_cast<long long>(n - i);
        const GrPoint p{sorted[i], count, std::log10(static_cast<double>(count))};
        const std::size_t copies = per_event ? (j - i + 1) : 1;
        points.insert(points.end(), copies, p);
        i = j + 1;
    }
    return points;
}

GrFit fit_gr(std::vector<GrPoint> points) {
    if (points.size() < 3) {
        throw InfeasibleError("G-R fit needs at least 3 points, got " +
                              std::to_string(points.size()));
    }
    bool two_distinct = false;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].magnitude != points[0].magnitude) {
            two_distinct = true;
            break;
        }
    }
    if (!two_distinct) {
        throw InfeasibleError("G-R fit undefined: all magnitudes identical");
    }

    double sx = 0.0, sy = 0.0;
    const double n = static_cast<double>(points.size());
    for (const GrPoint& p : points) {
        sx += p.magnitude;
        sy += p.log_count;
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const GrPoint& p : points) {
        const double dx = p.magnitude - mx;
        sxx += dx * dx;
        sxy += dx * (p.log_count - my);
    }
    const double slope = sxy / sxx;

    GrFit fit;
    fit.alpha = my - slope * mx;
    fit.beta = -slope;
    fit.nonpositive_beta = !(fit.beta > 0.0);

    double ss_res = 0.0, ss_tot = 0.0;
    for (const GrPoint& p : points) {
        const double r = p.log_count - (fit.alpha - fit.beta * p.magnitude);
        ss_res += r * r;
        const double dy = p.log_count - my;
        ss_tot += dy * dy;
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.points = std::move(points);
    return fit;
}

RateSeries temporal_rate(std::span<const Shock> aftershocks, std::span<const Date> calendar,
                         DateRange window, int bin_width_days) {
    if (bin_width_days < 1) {
        throw InputError("bin width must be >= 1 trading day");
    }
    std::vector<Date> days;
    for (const Date& d : calendar) {
        if (window.contains(d)) days.push_back(d);
    }
    if (days.empty()) {
        throw InfeasibleError("no trading days in rate window");
    }

    const std::size_t w = static_cast<std::size_t>(bin_width_days);
    const std::size_t n_bins = (days.size() + w - 1) / w;
    RateSeries rate;
    rate.bin_width_days = bin_width_days;
    rate.last_bin_partial = days.size() % w != 0;
    rate.counts.assign(n_bins, 0);
    rate.bin_start_dates.reserve(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        rate.bin_start_dates.push_back(days[b * w]);
    }
    for (const Shock& s : aftershocks) {
        const auto it = std::lower_bound(days.begin(), days.end(), s.start_date);
        if (it == days.end() || *it != s.start_date) continue;  // outside the window
        rate.counts[static_cast<std::size_t>(it - days.begin()) / w] += 1;
    }
    return rate;
}

std::string gr_points_to_csv(std::span<const GrPoint> points) {
    std::ostringstream out;
    out << "magnitude,count,log10_count\n";
    char buf[32];
    for (const GrPoint& p : points) {
        auto r = std::to_chars(buf, buf + sizeof buf, p.magnitude);
        out << std::string_view(buf, r.ptr - buf) << ',' << p.count << ',';
        r = std::to_chars(buf, buf + sizeof buf, p.log_count);
        out << std::string_view(buf, r.ptr - buf) << '\n';
    }
    return out.str();
}

std::string gr_fit_to_json(const GrFit& fit) {
    nlohmann::ordered_json j;
    j["alpha"] = fit.alpha;
    j["beta"] = fit.beta;
    j["r_squared"] = fit.r_squared;
    j["n_points"] = fit.points.size();
    auto flags = nlohmann::ordered_json::array();
    if (fit.nonpositive_beta) flags.push_back("nonpositive_beta");
    j["flags"] = std::move(flags);
    return j.dump(2);
}

}  // namespace crashstat
