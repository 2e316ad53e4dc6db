#include "crashstat/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crashstat/errors.hpp"

namespace crashstat {

namespace {

std::string shortest(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        if (comma == std::string::npos) {
            fields.push_back(trim(line.substr(pos)));
            break;
        }
        fields.push_back(trim(line.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return fields;
}

nlohmann::ordered_json config_to_json(const AnalysisConfig& c) {
    nlohmann::ordered_json j;
    j["threshold_ratio"] = c.threshold_ratio;
    j["breaks"] = c.breaks;
    j["h_min_fraction"] = c.h_min_fraction;
    j["bin_width_days"] = c.bin_width_days;
    j["per_event_points"] = c.per_event_points;
    j["include_mainshock"] = c.include_mainshock;
    j["log_price_breaks"] = c.log_price_breaks;
    return j;
}

}  // namespace

AnalysisResult analyze(const PriceSeries& series, const AnalysisConfig& config,
                       std::optional<DateRange> search_window, std::string crisis_label) {
    const std::vector<Shock> shocks = detect_shocks(series);
    if (shocks.empty()) {
        throw InfeasibleError("no shocks found");
    }
    const Shock mainshock = identify_mainshock(shocks, search_window);
    const InfluenceWindow window = influence_window(series, mainshock, config.breaks,
                                                    config.h_min_fraction,
                                                    config.log_price_breaks);

    std::vector<Shock> aftershocks;
    if (window.window_end > mainshock.end_date) {
        aftershocks = filter_aftershocks(shocks, mainshock, window.window_end,
                                         config.threshold_ratio);
    }

    AnalysisResult result{CrisisReport{},
                          CrisisWindow{mainshock, window.window_start, window.window_end,
                                       window.open_ended, aftershocks},
                          window.breaks,
                          {},
                          std::nullopt,
                          RateSeries{},
                          series};

    std::vector<double> magnitudes;
    magnitudes.reserve(aftershocks.size() + 1);
    for (const Shock& s : aftershocks) magnitudes.push_back(s.magnitude);
    if (config.include_mainshock) magnitudes.push_back(mainshock.magnitude);

    std::string no_fit_reason;
    if (!magnitudes.empty()) {
        result.gr_points = cumulative_counts(magnitudes, config.per_event_points);
        try {
            result.fit = fit_gr(result.gr_points);
        } catch (const InfeasibleError&) {
            no_fit_reason = "too_few_aftershocks";
        }
    } else {
        no_fit_reason = "no_aftershocks";
    }

    if (window.window_end > mainshock.end_date) {
        // Rate bins start on the first trading day after the mainshock trough.
        const std::size_t first = series.lower_bound(mainshock.end_date) + 1;
        if (first < series.size() && series.date(first) <= window.window_end) {
            result.rate = temporal_rate(aftershocks, series.dates(),
                                        DateRange{series.date(first), window.window_end},
                                        config.bin_width_days);
        }
    }

    CrisisReport& report = result.report;
    report.ticker = series.ticker();
    report.crisis_label = std::move(crisis_label);
    report.mainshock_start = mainshock.start_date;
    report.mainshock_end = mainshock.end_date;
    report.pct_fall = mainshock.pct_fall;
    report.magnitude = mainshock.magnitude;
    report.duration_days = mainshock.duration_days;
    report.window_start = window.window_start;
    report.window_end = window.window_end;
    report.open_ended = window.open_ended;
    report.n_aftershocks = static_cast<int>(aftershocks.size());
    if (result.fit) {
        report.fit = FitSummary{result.fit->alpha, result.fit->beta, result.fit->r_squared,
                                static_cast<int>(result.fit->points.size()),
                                result.fit->nonpositive_beta};
    } else {
        report.no_fit_reason = no_fit_reason;
    }
    report.consistency_flag =
        std::abs(report.pct_fall - (1.0 - std::pow(10.0, -report.magnitude))) > 1e-9;
    report.config = config;
    return result;
}

std::string report_to_json(const CrisisReport& r) {
    nlohmann::ordered_json j;
    j["ticker"] = r.ticker;
    j["crisis_label"] = r.crisis_label;
    j["mainshock"] = {{"start_date", format_date(r.mainshock_start)},
                      {"end_date", format_date(r.mainshock_end)},
                      {"pct_fall", r.pct_fall},
                      {"magnitude", r.magnitude},
                      {"duration_days", r.duration_days}};
    j["window"] = {{"start", format_date(r.window_start)},
                   {"end", format_date(r.window_end)},
                   {"open_ended", r.open_ended}};
    j["n_aftershocks"] = r.n_aftershocks;
    if (r.fit) {
        j["fit"] = {{"alpha", r.fit->alpha},
                    {"beta", r.fit->beta},
                    {"r_squared", r.fit->r_squared},
                    {"n_points", r.fit->n_points},
                    {"nonpositive_beta", r.fit->nonpositive_beta}};
    } else {
        j["fit"] = nullptr;
        j["no_fit_reason"] = r.no_fit_reason;
    }
    j["consistency_flag"] = r.consistency_flag;
    j["config"] = config_to_json(r.config);
    return j.dump(2);
}

std::string report_csv_header() {
    return "ticker,label,status,pct_fall,magnitude,duration_days,alpha,beta,r_squared,"
           "n_aftershocks,mainshock_start,mainshock_end,window_start,window_end,open_ended,"
           "consistency_flag,error";
}

std::string report_to_csv_row(const CrisisReport& r) {
    std::ostringstream out;
    out << r.ticker << ',' << r.crisis_label << ",ok," << shortest(r.pct_fall) << ','
        << shortest(r.magnitude) << ',' << r.duration_days << ',';
    if (r.fit) {
        out << shortest(r.fit->alpha) << ',' << shortest(r.fit->beta) << ','
            << shortest(r.fit->r_squared);
    } else {
        out << ",,";
    }
    out << ',' << r.n_aftershocks << ',' << format_date(r.mainshock_start) << ','
        << format_date(r.mainshock_end) << ',' << format_date(r.window_start) << ','
        << format_date(r.window_end) << ',' << (r.open_ended ? 1 : 0) << ','
        << (r.consistency_flag ? 1 : 0) << ',';
    return out.str();
}

std::string report_to_table(const CrisisReport& r) {
    std::ostringstream out;
    out << r.ticker;
    if (!r.crisis_label.empty()) out << " (" << r.crisis_label << ")";
    out << "\n";
    out << "  mainshock      " << format_date(r.mainshock_start) << " -> "
        << format_date(r.mainshock_end) << "  (" << r.duration_days << " declining days)\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "  fall           %.2f%%  (M = %.4f)\n", r.pct_fall * 100.0,
                  r.magnitude);
    out << buf;
    out << "  window         " << format_date(r.window_start) << " -> "
        << format_date(r.window_end) << (r.open_ended ? "  [open-ended]" : "") << "\n";
    out << "  aftershocks    " << r.n_aftershocks << "\n";
    if (r.fit) {
        std::snprintf(buf, sizeof buf, "  G-R fit        alpha = %.3f  beta = %.3f  (r^2 = %.4f",
                      r.fit->alpha, r.fit->beta, r.fit->r_squared);
        out << buf << ", " << r.fit->n_points << " points)"
            << (r.fit->nonpositive_beta ? "  [nonpositive beta]" : "") << "\n";
    } else {
        out << "  G-R fit        unavailable (" << r.no_fit_reason << ")\n";
    }
    if (r.consistency_flag) {
        out << "  WARNING        pct_fall and magnitude disagree\n";
    }
    return out.str();
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open manifest " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty manifest " + path.string());
    const auto header = split_line(line);
    if (header.size() < 2 || header[0] != "ticker" || header[1] != "path") {
        throw InputError("manifest must start with header ticker,path,label,"
                         "window_start,window_end");
    }
    const auto base = path.parent_path();
    std::vector<ManifestEntry> entries;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto fields = split_line(line);
        fields.resize(5);
        ManifestEntry e;
        e.ticker = fields[0];
        std::filesystem::path p = fields[1];
        e.path = p.is_absolute() ? p : base / p;
        e.label = fields[2];
        if (!fields[3].empty() || !fields[4].empty()) {
            if (fields[3].empty() || fields[4].empty()) {
                throw InputError("manifest row for " + e.ticker +
                                 ": window needs both start and end");
            }
            e.window = DateRange{parse_date(fields[3]), parse_date(fields[4])};
            if (e.window->start > e.window->end) {
                throw InputError("manifest row for " + e.ticker + ": window start after end");
            }
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<BatchRow> run_batch(const std::filesystem::path& manifest,
                                const AnalysisConfig& config) {
    std::vector<BatchRow> rows;
    for (ManifestEntry& entry : read_manifest(manifest)) {
        BatchRow row{std::move(entry), std::nullopt, ""};
        try {
            const auto loaded = load_csv(row.entry.path, CsvSchema{}, row.entry.ticker);
            row.report = analyze(loaded.series, config, row.entry.window, row.entry.label).report;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string batch_to_csv(const std::vector<BatchRow>& rows) {
    std::ostringstream out;
    out << report_csv_header() << '\n';
    for (const BatchRow& row : rows) {
        if (row.report) {
            out << report_to_csv_row(*row.report) << '\n';
        } else {
            std::string msg = row.error;
            for (char& c : msg) {
                if (c == ',' || c == '\n') c = ';';
            }
            out << row.entry.ticker << ',' << row.entry.label
                << ",error,,,,,,,,,,,,,," << msg << '\n';
        }
    }
    return out.str();
}

void emit_plot_data(const AnalysisResult& result, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    auto open = [&](const char* name) {
        std::ofstream f(out_dir / name, std::ios::binary);
        if (!f) throw InputError("cannot write " + (out_dir / name).string());
        return f;
    };

    {
        auto f = open("gr_points.csv");
        f << gr_points_to_csv(result.gr_points);
    }
    if (result.fit) {
        auto f = open("gr_fit.csv");
        f << "magnitude,log10_count\n";
        const auto& pts = result.fit->points;
        const double lo = pts.front().magnitude;
        const double hi = pts.back().magnitude;
        f << shortest(lo) << ',' << shortest(result.fit->fitted_log_count(lo)) << '\n';
        f << shortest(hi) << ',' << shortest(result.fit->fitted_log_count(hi)) << '\n';
    }
    {
        auto f = open("price_with_breaks.csv");
        f << "date,close,is_break\n";
        std::size_t b = 0;
        const auto& breaks = result.breaks.break_indices;
        for (std::size_t i = 0; i < result.series.size(); ++i) {
            bool is_break = false;
            if (b < breaks.size() && static_cast<std::size_t>(breaks[b]) == i) {
                is_break = true;
                ++b;
            }
            f << format_date(result.series.date(i)) << ',' << shortest(result.series.close(i))
              << ',' << (is_break ? 1 : 0) << '\n';
        }
    }
    {
        auto f = open("aftershock_rate.csv");
        f << "bin_start_date,count,is_partial\n";
        for (std::size_t i = 0; i < result.rate.counts.size(); ++i) {
            const bool partial = result.rate.last_bin_partial &&
                                 i + 1 == result.rate.counts.size();
            f << format_date(result.rate.bin_start_dates[i]) << ',' << result.rate.counts[i]
              << ',' << (partial ? 1 : 0) << '\n';
        }
    }
}

}  // namespace crashstat
