#include "crashstat/shocks.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crashstat/errors.hpp"

namespace crashstat {

namespace {

Shock make_shock(const PriceSeries& series, std::size_t peak, std::size_t trough) {
    Shock s;
    s.start_index = peak;
    s.end_index = trough;
    s.start_date = series.date(peak);
    s.end_date = series.date(trough);
    s.peak_price = series.close(peak);
    s.trough_price = series.close(trough);
    s.duration_days = static_cast<int>(trough - peak);
    s.magnitude = std::log10(s.peak_price / s.trough_price);
    s.pct_fall = 1.0 - s.trough_price / s.peak_price;
    return s;
}

std::string shortest(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

}  // namespace

std::vector<Shock> detect_shocks(const PriceSeries& series) {
    if (series.size() < 2) {
        throw InfeasibleError("shock detection needs at least 2 observations");
    }
    std::vector<Shock> shocks;
    const auto closes = series.closes();
    std::size_t i = 1;
    while (i < closes.size()) {
        if (closes[i] < closes[i - 1]) {
            const std::size_t peak = i - 1;
            std::size_t trough = i;
            while (trough + 1 < closes.size() && closes[trough + 1] < closes[trough]) {
                ++trough;
            }
            shocks.push_back(make_shock(series, peak, trough));
            i = trough + 1;
        } else {
            ++i;
        }
    }
    return shocks;
}

Shock identify_mainshock(std::span<const Shock> shocks, std::optional<DateRange> search_window) {
    const Shock* best = nullptr;
    for (const Shock& s : shocks) {
        if (search_window && !search_window->contains(s.start_date)) continue;
        if (!best || s.magnitude > best->magnitude) best = &s;
    }
    if (!best) {
        throw InfeasibleError(search_window ? "no shocks in search window" : "no shocks found");
    }
    return *best;
}

std::vector<Shock> filter_aftershocks(std::span<const Shock> shocks, const Shock& mainshock,
                                      Date window_end, double threshold_ratio) {
    if (!(threshold_ratio > 0.0) || !(threshold_ratio < 1.0)) {
        throw InputError("threshold_ratio must be in (0, 1)");
    }
    if (window_end <= mainshock.end_date) {
        throw InputError("window_end must be after the mainshock trough");
    }
    // Inclusive boundary: relative slack keeps a magnitude equal to
    // ratio * M from being cut by rounding of the product.
    const double cutoff = threshold_ratio * mainshock.magnitude * (1.0 - 1e-9);
    std::vector<Shock> out;
    for (const Shock& s : shocks) {
        if (s.start_date <= mainshock.end_date) continue;
        if (s.start_date > window_end) continue;
        if (s.magnitude < cutoff) continue;
        out.push_back(s);
    }
    return out;
}

std::string shocks_to_csv(std::span<const Shock> shocks) {
    std::ostringstream out;
    out << "start_date,end_date,peak,trough,duration,magnitude,pct_fall\n";
    for (const Shock& s : shocks) {
        out << format_date(s.start_date) << ',' << format_date(s.end_date) << ','
            << shortest(s.peak_price) << ',' << shortest(s.trough_price) << ','
            << s.duration_days << ',' << shortest(s.magnitude) << ',' << shortest(s.pct_fall)
            << '\n';
    }
    return out.str();
}

std::string shocks_to_json(std::span<const Shock> shocks) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Shock& s : shocks) {
        arr.push_back({{"start_date", format_date(s.start_date)},
                       {"end_date", format_date(s.end_date)},
                       {"peak", s.peak_price},
                       {"trough", s.trough_price},
                       {"duration", s.duration_days},
                       {"magnitude", s.magnitude},
                       {"pct_fall", s.pct_fall}});
    }
    return arr.dump(2);
}

}  // namespace crashstat
