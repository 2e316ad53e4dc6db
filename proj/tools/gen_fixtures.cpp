// Regenerates the bundled fixture series, their synth specs, and the batch
// manifest under data/. The fixtures are synthetic replicas: planted crash
// runs, planted break levels, and aftershock magnitudes placed on exact
// Gutenberg-Richter exceedance curves, so the pipeline's published-statistics
// checks have a deterministic ground truth.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "crashstat/report.hpp"
#include "crashstat/synth.hpp"

using namespace crashstat;

namespace {

std::vector<Date> weekdays_between(Date start, Date end) {
    std::vector<Date> days;
    for (Date d = start; d <= end; d += std::chrono::days{1}) {
        if (is_weekday(d)) days.push_back(d);
    }
    return days;
}

int index_at_or_after(const std::vector<Date>& cal, Date d) {
    const auto it = std::lower_bound(cal.begin(), cal.end(), d);
    return static_cast<int>(it - cal.begin());
}

// Deterministic integer draws from the raw engine stream; std::shuffle and
// the distribution adaptors are implementation-specified.
struct Draws {
    std::mt19937_64 eng;
    explicit Draws(std::uint64_t seed) : eng(seed) {}
    int below(int n) { return static_cast<int>(eng() % static_cast<std::uint64_t>(n)); }
};

struct AftershockPlan {
    double alpha;       // target intercept of the planted exceedance curve
    double beta;        // target slope magnitude
    int count;
    double cap;         // largest allowed magnitude (stay below the mainshock)
    int first_index;    // earliest peak index
    int last_index;     // latest trough index
};

// Magnitudes on the exact line log10(N) = alpha - beta*M, largest capped,
// spread over the window in shuffled order.
void plant_aftershocks(SynthSpec& spec, const AftershockPlan& plan, Draws& draws) {
    std::vector<double> mags;
    for (int k = 1; k <= plan.count; ++k) {
        double m = (plan.alpha - std::log10(static_cast<double>(k))) / plan.beta;
        mags.push_back(std::min(m, plan.cap));
    }
    for (int i = plan.count - 1; i > 0; --i) {
        std::swap(mags[static_cast<std::size_t>(i)],
                  mags[static_cast<std::size_t>(draws.below(i + 1))]);
    }
    const int span = plan.last_index - plan.first_index;
    const int stride = span / plan.count;
    int pos = plan.first_index;
    int prev_end = spec.planted_shocks.empty()
                       ? 0
                       : spec.planted_shocks.back().start_index +
                             spec.planted_shocks.back().duration_days;
    for (int k = 0; k < plan.count; ++k) {
        const double m = mags[static_cast<std::size_t>(k)];
        const int duration = std::clamp(1 + static_cast<int>(m / 0.016), 1, 6);
        int start = pos + draws.below(std::max(1, stride / 3));
        start = std::max(start, prev_end + 3);
        spec.planted_shocks.push_back(PlantedShock{start, m, duration});
        prev_end = start + duration;
        pos += stride;
    }
}

void monthly_ramp(SynthSpec& spec, const std::vector<Date>& cal, int from_year, int from_month,
                  int to_year, int to_month, double from_level, double to_level) {
    int steps = (to_year - from_year) * 12 + (to_month - from_month) + 1;
    int j = 0;
    for (int y = from_year, m = from_month; y < to_year || (y == to_year && m <= to_month);) {
        ++j;
        const double level = from_level * std::pow(to_level / from_level,
                                                   static_cast<double>(j) / steps);
        spec.planted_breaks.push_back(
            PlantedBreak{index_at_or_after(cal, make_date(y, static_cast<unsigned>(m), 1)),
                         level});
        if (++m > 12) {
            m = 1;
            ++y;
        }
    }
}

PriceSeries rounded(const PriceSeries& series) {
    std::vector<double> closes(series.closes().begin(), series.closes().end());
    for (double& c : closes) c = std::round(c * 1e4) / 1e4;
    return PriceSeries(series.ticker(),
                       std::vector<Date>(series.dates().begin(), series.dates().end()),
                       std::move(closes));
}

void report_fixture(const char* name, const PriceSeries& series,
                    std::optional<DateRange> window) {
    const auto result = analyze(series, {}, window);
    const auto& r = result.report;
    std::printf("%s: n=%zu mainshock %s dur=%d M=%.4f fall=%.1f%%\n", name, series.size(),
                format_date(r.mainshock_start).c_str(), r.duration_days, r.magnitude,
                r.pct_fall * 100);
    std::printf("    window %s -> %s%s  aftershocks=%d\n",
                format_date(r.window_start).c_str(), format_date(r.window_end).c_str(),
                r.open_ended ? " [open]" : "", r.n_aftershocks);
    if (r.fit) {
        std::printf("    alpha=%.3f beta=%.2f r2=%.4f n=%d\n", r.fit->alpha, r.fit->beta,
                    r.fit->r_squared, r.fit->n_points);
    } else {
        std::printf("    no fit: %s\n", r.no_fit_reason.c_str());
    }
}

SynthSpec djia_spec() {
    const auto cal = weekdays_between(make_date(1987, 1, 2), make_date(1990, 6, 29));
    SynthSpec spec;
    spec.ticker = "DJIA";
    spec.start_date = cal.front();
    spec.n_days = static_cast<int>(cal.size());
    spec.base_price = 1950.0;
    spec.volatility = 0.0012;
    spec.reversion = 0.05;
    spec.seed = 19871;

    const int crash = index_at_or_after(cal, make_date(1987, 10, 13));
    const double peak_level = 2640.0;
    const double trough_level = peak_level * std::pow(10.0, -0.18);
    spec.planted_breaks.push_back(
        PlantedBreak{index_at_or_after(cal, make_date(1987, 6, 1)), peak_level});
    spec.planted_breaks.push_back(PlantedBreak{crash + 11, trough_level});
    monthly_ramp(spec, cal, 1988, 7, 1989, 9, trough_level, 2150.0);
    spec.planted_breaks.push_back(
        PlantedBreak{index_at_or_after(cal, make_date(1989, 11, 20)), 2750.0});

    spec.planted_shocks.push_back(PlantedShock{crash, 0.18, 11});
    Draws draws(spec.seed + 1);
    plant_aftershocks(spec,
                      AftershockPlan{1.6, 25.0, 19, 0.9 * 0.18,
                                     index_at_or_after(cal, make_date(1987, 11, 16)),
                                     index_at_or_after(cal, make_date(1989, 9, 15))},
                      draws);
    return spec;
}

SynthSpec sp500_spec() {
    const auto cal = weekdays_between(make_date(2006, 1, 2), make_date(2012, 12, 31));
    SynthSpec spec;
    spec.ticker = "SP500";
    spec.start_date = cal.front();
    spec.n_days = static_cast<int>(cal.size());
    spec.base_price = 1290.0;
    spec.volatility = 0.0010;
    spec.reversion = 0.05;
    spec.seed = 20081;

    const int crash = index_at_or_after(cal, make_date(2008, 9, 26));
    const double magnitude = 0.11351;  // 23.0% fall
    const double peak_level = 1455.0;
    const double trough_level = peak_level * std::pow(10.0, -magnitude);
    spec.planted_breaks.push_back(
        PlantedBreak{index_at_or_after(cal, make_date(2007, 7, 2)), peak_level});
    spec.planted_breaks.push_back(PlantedBreak{crash + 8, trough_level});
    monthly_ramp(spec, cal, 2009, 6, 2011, 9, trough_level, 1230.0);
    spec.planted_breaks.push_back(
        PlantedBreak{index_at_or_after(cal, make_date(2011, 10, 3)), 1380.0});

    spec.planted_shocks.push_back(PlantedShock{crash, magnitude, 8});
    Draws draws(spec.seed + 1);
    plant_aftershocks(spec,
                      AftershockPlan{1.71, 13.0, 40, 0.985 * magnitude,
                                     index_at_or_after(cal, make_date(2008, 11, 3)),
                                     index_at_or_after(cal, make_date(2011, 8, 19))},
                      draws);
    return spec;
}

SynthSpec amzn_spec() {
    const auto cal = weekdays_between(make_date(2007, 1, 1), make_date(2012, 12, 31));
    SynthSpec spec;
    spec.ticker = "AMZN";
    spec.start_date = cal.front();
    spec.n_days = static_cast<int>(cal.size());
    spec.base_price = 38.0;
    spec.volatility = 0.0011;
    spec.reversion = 0.05;
    spec.seed = 20071;

    const int crash = index_at_or_after(cal, make_date(2008, 9, 29));
    const double magnitude = 0.1481;  // 28.9% fall
    const double peak_level = 88.0;
    const double trough_level = peak_level * std::pow(10.0, -magnitude);
    spec.planted_breaks.push_back(
        PlantedBreak{index_at_or_after(cal, make_date(2007, 10, 1)), peak_level});
    spec.planted_breaks.push_back(PlantedBreak{crash + 6, trough_level});
    monthly_ramp(spec, cal, 2009, 6, 2011, 9, trough_level, 75.0);
    spec.planted_breaks.push_back(
        PlantedBreak{index_at_or_after(cal, make_date(2011, 10, 3)), 98.0});

    spec.planted_shocks.push_back(PlantedShock{crash, magnitude, 6});
    Draws draws(spec.seed + 1);
    plant_aftershocks(spec,
                      AftershockPlan{1.9, 15.0, 55, 0.9 * magnitude,
                                     index_at_or_after(cal, make_date(2008, 11, 10)),
                                     index_at_or_after(cal, make_date(2011, 8, 15))},
                      draws);
    return spec;
}

}  // namespace

int main() {
    const std::filesystem::path data_dir(CRASHSTAT_DATA_DIR);
    std::filesystem::create_directories(data_dir / "specs");

    const struct {
        const char* csv;
        const char* spec;
        SynthSpec recipe;
        const char* label;
        const char* window;
    } fixtures[] = {
        {"djia_1987.csv", "djia_1987.json", djia_spec(), "1987 crash",
         "1987-01-02,1988-12-30"},
        {"sp500_2006_2012.csv", "sp500_2006_2012.json", sp500_spec(), "2008 financial crisis",
         "2007-01-03,2009-12-31"},
        {"amzn_2007_2012.csv", "amzn_2007_2012.json", amzn_spec(), "2008 financial crisis",
         "2007-01-03,2009-12-31"},
    };

    std::string manifest = "ticker,path,label,window_start,window_end\n";
    for (const auto& f : fixtures) {
        const auto series = rounded(generate(f.recipe));
        save_csv(series, data_dir / f.csv);
        f.recipe.save(data_dir / "specs" / f.spec);
        manifest += series.ticker();
        manifest += ',';
        manifest += f.csv;
        manifest += ',';
        manifest += f.label;
        manifest += ',';
        manifest += f.window;
        manifest += '\n';
        std::optional<DateRange> window;
        const std::string w = f.window;
        const auto comma = w.find(',');
        window = DateRange{parse_date(w.substr(0, comma)), parse_date(w.substr(comma + 1))};
        report_fixture(series.ticker().c_str(), series, window);
    }
    std::ofstream(data_dir / "manifest.csv", std::ios::binary) << manifest;
    std::printf("fixtures written to %s\n", data_dir.string().c_str());
    return 0;
}
