// crashstat: segment daily closes into decline shocks, bound a crisis window
// with structural breaks, fit the Gutenberg-Richter law to the aftershock
// sequence, and emit summary reports and plot-ready data.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <cmath>

#include <CLI11.hpp>

#include "crashstat/errors.hpp"
#include "crashstat/report.hpp"
#include "crashstat/synth.hpp"

namespace {

using namespace crashstat;

struct CommonOptions {
    std::string input;
    std::string schema_text;
    std::string window_text;
    std::string ticker;
    std::string label;
    std::string format = "table";
    std::string out_dir;
    AnalysisConfig config;
};

CsvSchema parse_schema(const std::string& text) {
    CsvSchema schema;
    if (text.empty()) return schema;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const auto item = text.substr(pos, comma - pos);
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw InputError("schema items must look like date=COL or close=COL");
        }
        const auto key = item.substr(0, eq);
        const auto value = item.substr(eq + 1);
        if (key == "date") {
            schema.date_column = value;
        } else if (key == "close") {
            schema.close_column = value;
        } else {
            throw InputError("unknown schema key '" + key + "'");
        }
        pos = comma + 1;
    }
    return schema;
}

std::optional<DateRange> parse_window(const std::string& text) {
    if (text.empty()) return std::nullopt;
    return parse_date_range(text);
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InputError("cannot write " + p.string());
    out << text;
}

void add_config_flags(CLI::App* cmd, AnalysisConfig& config) {
    cmd->add_option("--threshold", config.threshold_ratio,
                    "aftershock threshold as a fraction of the mainshock magnitude")
        ->capture_default_str();
    cmd->add_option("--breaks", config.breaks, "structural breaks (segments - 1)")
        ->capture_default_str();
    cmd->add_option("--min-seg", config.h_min_fraction,
                    "minimum segment length as a fraction of the sample")
        ->capture_default_str();
    cmd->add_option("--bin-days", config.bin_width_days, "aftershock rate bin, trading days")
        ->capture_default_str();
    cmd->add_flag("--per-event-points", config.per_event_points,
                  "one G-R point per event instead of per distinct magnitude");
    cmd->add_flag("--include-mainshock", config.include_mainshock,
                  "include the mainshock in the fitted point set");
    cmd->add_flag("--log-price-breaks", config.log_price_breaks,
                  "estimate breaks on log10 price");
}

int run_analyze(const CommonOptions& opt) {
    const auto loaded = load_csv(opt.input, parse_schema(opt.schema_text), opt.ticker);
    if (loaded.rows_dropped > 0) {
        std::cerr << "note: dropped " << loaded.rows_dropped << " unusable rows\n";
    }
    const auto result =
        analyze(loaded.series, opt.config, parse_window(opt.window_text), opt.label);
    if (opt.format == "json") {
        std::cout << report_to_json(result.report) << '\n';
    } else if (opt.format == "csv") {
        std::cout << report_csv_header() << '\n' << report_to_csv_row(result.report) << '\n';
    } else {
        std::cout << report_to_table(result.report);
    }
    if (!opt.out_dir.empty()) {
        const std::filesystem::path dir(opt.out_dir);
        std::filesystem::create_directories(dir);
        write_text(dir / "report.json", report_to_json(result.report) + "\n");
        emit_plot_data(result, dir);
    }
    return 0;
}

int run_batch(const CommonOptions& opt, const std::string& manifest) {
    const auto rows = crashstat::run_batch(manifest, opt.config);
    const auto csv = batch_to_csv(rows);
    if (opt.format == "json") {
        std::cout << "[\n";
        bool first = true;
        for (const auto& row : rows) {
            if (!first) std::cout << ",\n";
            first = false;
            if (row.report) {
                std::cout << report_to_json(*row.report);
            } else {
                std::cout << "{\"ticker\": \"" << row.entry.ticker << "\", \"error\": \""
                          << row.error << "\"}";
            }
        }
        std::cout << "\n]\n";
    } else {
        std::cout << csv;
    }
    if (!opt.out_dir.empty()) {
        const std::filesystem::path dir(opt.out_dir);
        std::filesystem::create_directories(dir);
        write_text(dir / "summary.csv", csv);
    }
    int failures = 0;
    for (const auto& row : rows) failures += row.report ? 0 : 1;
    if (failures > 0) {
        std::cerr << failures << " of " << rows.size() << " rows failed\n";
    }
    return 0;
}

int run_breaks(const CommonOptions& opt) {
    const auto loaded = load_csv(opt.input, parse_schema(opt.schema_text), opt.ticker);
    const auto& series = loaded.series;
    const int n = static_cast<int>(series.size());
    const int h_min =
        std::max(2, static_cast<int>(std::llround(opt.config.h_min_fraction * n)));
    std::vector<double> y(series.closes().begin(), series.closes().end());
    if (opt.config.log_price_breaks) {
        for (double& v : y) v = std::log10(v);
    }
    auto result = optimal_partition(y, opt.config.breaks, h_min);
    for (int k : result.break_indices) result.break_dates.push_back(series.date(k));
    const auto json = break_result_to_json(result) + "\n";
    std::cout << json;
    if (!opt.out_dir.empty()) {
        const std::filesystem::path dir(opt.out_dir);
        std::filesystem::create_directories(dir);
        write_text(dir / "breaks.json", json);
    }
    return 0;
}

int run_grfit(const CommonOptions& opt, const std::string& column) {
    std::ifstream in(opt.input);
    if (!in) throw InputError("cannot open " + opt.input);
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty file " + opt.input);

    // locate the magnitude column in the header
    std::vector<std::string> header;
    std::size_t pos = 0;
    while (true) {
        auto comma = line.find(',', pos);
        if (comma == std::string::npos) {
            header.push_back(line.substr(pos));
            break;
        }
        header.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    std::size_t col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        auto name = header[i];
        while (!name.empty() && (name.back() == '\r' || name.back() == ' ')) name.pop_back();
        if (name == column) col = i;
    }
    if (col == header.size()) {
        throw InputError("no '" + column + "' column in " + opt.input);
    }

    std::vector<double> magnitudes;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t field = 0, start = 0;
        std::string value;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                if (field == col) value = line.substr(start, i - start);
                ++field;
                start = i + 1;
            }
        }
        try {
            magnitudes.push_back(std::stod(value));
        } catch (const std::exception&) {
            throw InputError("bad magnitude '" + value + "' in " + opt.input);
        }
    }

    const auto points = cumulative_counts(magnitudes, opt.config.per_event_points);
    const auto fit = fit_gr(points);
    std::cout << gr_fit_to_json(fit) << '\n';
    if (!opt.out_dir.empty()) {
        const std::filesystem::path dir(opt.out_dir);
        std::filesystem::create_directories(dir);
        write_text(dir / "gr_fit.json", gr_fit_to_json(fit) + "\n");
        write_text(dir / "gr_points.csv", gr_points_to_csv(points));
    }
    return 0;
}

int run_synth(const std::string& spec_path, const std::string& out_path,
              std::optional<std::uint64_t> seed, std::optional<int> round_decimals) {
    auto spec = SynthSpec::load(spec_path);
    if (seed) spec.seed = *seed;
    auto series = generate(spec);
    if (round_decimals) {
        if (*round_decimals < 0 || *round_decimals > 12) {
            throw InputError("--round must be between 0 and 12");
        }
        const double scale = std::pow(10.0, *round_decimals);
        std::vector<double> closes(series.closes().begin(), series.closes().end());
        for (double& c : closes) c = std::round(c * scale) / scale;
        series = PriceSeries(series.ticker(),
                             std::vector<Date>(series.dates().begin(), series.dates().end()),
                             std::move(closes));
    }
    save_csv(series, out_path);
    std::cerr << "wrote " << series.size() << " rows to " << out_path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crash statistics pipeline: decline shocks, structural breaks, "
                 "Gutenberg-Richter fits"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string manifest, column = "magnitude", spec_path, synth_out;
    std::optional<std::uint64_t> seed;
    std::optional<int> round_decimals;

    auto* analyze_cmd = app.add_subcommand("analyze", "full pipeline on one CSV");
    analyze_cmd->add_option("--input", opt.input, "price CSV")->required();
    analyze_cmd->add_option("--schema", opt.schema_text, "date=COL,close=COL mapping");
    analyze_cmd->add_option("--window", opt.window_text, "mainshock search window START:END");
    analyze_cmd->add_option("--ticker", opt.ticker, "ticker override (default: file stem)");
    analyze_cmd->add_option("--label", opt.label, "crisis label for the report");
    analyze_cmd->add_option("--format", opt.format, "table|json|csv")->capture_default_str();
    analyze_cmd->add_option("--out", opt.out_dir, "directory for report.json and plot data");
    add_config_flags(analyze_cmd, opt.config);

    auto* batch_cmd = app.add_subcommand("batch", "run a manifest of instruments");
    batch_cmd->add_option("--manifest", manifest, "manifest CSV")->required();
    batch_cmd->add_option("--format", opt.format, "csv|json")->capture_default_str();
    batch_cmd->add_option("--out", opt.out_dir, "directory for summary.csv");
    add_config_flags(batch_cmd, opt.config);

    auto* breaks_cmd = app.add_subcommand("breaks", "structural breaks only");
    breaks_cmd->add_option("--input", opt.input, "price CSV")->required();
    breaks_cmd->add_option("--schema", opt.schema_text, "date=COL,close=COL mapping");
    breaks_cmd->add_option("--ticker", opt.ticker, "ticker override");
    breaks_cmd->add_option("--out", opt.out_dir, "directory for breaks.json");
    add_config_flags(breaks_cmd, opt.config);

    auto* grfit_cmd = app.add_subcommand("grfit", "G-R fit from a magnitude column");
    grfit_cmd->add_option("--input", opt.input, "CSV with a magnitude column")->required();
    grfit_cmd->add_option("--column", column, "magnitude column name")->capture_default_str();
    grfit_cmd->add_option("--out", opt.out_dir, "directory for gr_fit.json and gr_points.csv");
    grfit_cmd->add_flag("--per-event-points", opt.config.per_event_points,
                        "one point per event");

    auto* synth_cmd = app.add_subcommand("synth", "generate a series from a spec");
    synth_cmd->add_option("--spec", spec_path, "SynthSpec JSON")->required();
    synth_cmd->add_option("--out", synth_out, "output CSV path")->required();
    synth_cmd->add_option("--seed", seed, "seed override");
    synth_cmd->add_option("--round", round_decimals,
                          "round prices to this many decimals (fixtures use 4)");

    try {
        app.parse(argc, argv);
        if (*analyze_cmd) return run_analyze(opt);
        if (*batch_cmd) return run_batch(opt, manifest);
        if (*breaks_cmd) return run_breaks(opt);
        if (*grfit_cmd) return run_grfit(opt, column);
        if (*synth_cmd) return run_synth(spec_path, synth_out, seed, round_decimals);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const crashstat::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const crashstat::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
