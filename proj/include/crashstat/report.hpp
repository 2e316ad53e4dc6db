#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crashstat/breakpoints.hpp"
#include "crashstat/market_data.hpp"
#include "crashstat/powerlaw.hpp"
#include "crashstat/shocks.hpp"

namespace crashstat {

/// Pipeline tunables. Every report echoes the full configuration.
struct AnalysisConfig {
    double threshold_ratio = 0.07;   // aftershock magnitude floor, fraction of mainshock M
    int breaks = 3;                  // structural breaks for the influence window
    double h_min_fraction = 0.10;    // minimum segment length, fraction of the sample
    int bin_width_days = 20;         // temporal rate bin, trading days
    bool per_event_points = false;   // one G-R point per event instead of per distinct M
    bool include_mainshock = false;  // add the mainshock to the fitted point set
    bool log_price_breaks = false;   // estimate breaks on log10 price
};

struct FitSummary {
    double alpha = 0.0;
    double beta = 0.0;
    double r_squared = 0.0;
    int n_points = 0;
    bool nonpositive_beta = false;
};

/// One summary-table row for a crisis on one instrument.
struct CrisisReport {
    std::string ticker;
    std::string crisis_label;
    Date mainshock_start;
    Date mainshock_end;
    double pct_fall = 0.0;
    double magnitude = 0.0;
    int duration_days = 0;
    Date window_start;
    Date window_end;
    bool open_ended = false;
    int n_aftershocks = 0;
    std::optional<FitSummary> fit;
    std::string no_fit_reason;     // set when fit is absent
    bool consistency_flag = false; // pct_fall vs 1 - 10^(-M) identity violated
    AnalysisConfig config;
};

/// Full pipeline output: the report row plus everything needed for plots.
struct AnalysisResult {
    CrisisReport report;
    CrisisWindow window;
    BreakResult breaks;
    std::vector<GrPoint> gr_points;
    std::optional<GrFit> fit;
    RateSeries rate;
    PriceSeries series;
};

/// Runs detect -> mainshock -> influence window -> aftershock filter ->
/// cumulative counts -> G-R fit -> temporal rate. Too few aftershocks for a
/// fit yields a report with the fit absent and a reason code; no shocks at
/// all or infeasible break estimation throw InfeasibleError.
AnalysisResult analyze(const PriceSeries& series, const AnalysisConfig& config = {},
                       std::optional<DateRange> search_window = std::nullopt,
                       std::string crisis_label = "");

std::string report_to_json(const CrisisReport& report);
std::string report_csv_header();
std::string report_to_csv_row(const CrisisReport& report);
std::string report_to_table(const CrisisReport& report);

/// One batch entry: ticker, CSV path, optional crisis search window, label.
struct ManifestEntry {
    std::string ticker;
    std::filesystem::path path;
    std::string label;
    std::optional<DateRange> window;
};

/// Manifest CSV: header ticker,path,label,window_start,window_end.
/// Empty window fields mean no restriction; relative paths resolve against
/// the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

struct BatchRow {
    ManifestEntry entry;
    std::optional<CrisisReport> report;
    std::string error;  // set when this row failed
};

/// One report per manifest row; failures are recorded per row without
/// aborting the batch. Output row count always equals manifest row count.
std::vector<BatchRow> run_batch(const std::filesystem::path& manifest,
                                const AnalysisConfig& config);

/// Combined summary table (%fall, M, alpha, beta columns plus diagnostics).
std::string batch_to_csv(const std::vector<BatchRow>& rows);

/// Writes gr_points.csv, gr_fit.csv (when fitted), price_with_breaks.csv and
/// aftershock_rate.csv into out_dir. Formats are byte-stable for goldens.
void emit_plot_data(const AnalysisResult& result, const std::filesystem::path& out_dir);

}  // namespace crashstat
