#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "crashstat/breakpoints.hpp"
#include "crashstat/market_data.hpp"

namespace crashstat {

/// Mean-level shift: the background level becomes `level` from `index` on.
struct PlantedBreak {
    int index = 0;
    double level = 0.0;
};

/// A decline run of exactly `magnitude` (base-10 log peak/trough) spread over
/// `duration_days` strictly decreasing closes starting at the peak
/// `start_index`.
struct PlantedShock {
    int start_index = 0;
    double magnitude = 0.0;
    int duration_days = 1;
};

/// Recipe for a synthetic price series with planted structure.
///
/// The background is a seeded walk in log10 price anchored to the planted
/// levels: deviation w follows w <- (1 - reversion) * w + volatility * z with
/// a deterministic per-day drift added to the baseline. Planted shocks
/// overwrite their run days and are guarded on both sides so each appears as
/// exactly one maximal decline run.
struct SynthSpec {
    int n_days = 0;
    double base_price = 100.0;
    double drift = 0.0;       // per-day log10 baseline drift
    double volatility = 0.0;  // per-day log10 noise scale
    double reversion = 0.05;  // pull of the deviation back toward the level
    Date start_date = make_date(2000, 1, 3);
    std::string ticker = "SYNTH";
    std::uint64_t seed = 0;
    std::vector<PlantedBreak> planted_breaks;  // strictly increasing indices
    std::vector<PlantedShock> planted_shocks;  // ordered, non-overlapping

    /// Throws InputError on out-of-range indices, overlapping shocks,
    /// non-positive levels or magnitudes.
    void validate() const;

    static SynthSpec from_json_text(const std::string& text);
    static SynthSpec load(const std::filesystem::path& path);
    std::string to_json() const;
    void save(const std::filesystem::path& path) const;
};

/// Deterministic per seed. Trading calendar is consecutive weekdays from
/// start_date. With volatility = 0 each planted shock's detected magnitude
/// equals the planted value to 1e-9.
PriceSeries generate(const SynthSpec& spec);

/// Inverse-transform samples of the exceedance law N(M)/N(m_min) =
/// 10^(-beta (M - m_min)) implied by the G-R line. Deterministic per seed.
/// `alpha` is accepted for symmetry with the fitted parameters but does not
/// affect sampling: the absolute level of the curve is fixed by n.
std::vector<double> sample_gr_magnitudes(double alpha, double beta, int n, double m_min,
                                         std::uint64_t seed);

/// Exhaustive reference for optimal_partition: enumerates every admissible
/// partition (combinatorial guard n <= 40) and keeps the first optimum in
/// lexicographic break order, accumulating segment costs in the same
/// association order as the dynamic program so totals compare bit-exactly.
BreakResult brute_force_partition(std::span<const double> y, int m, int h_min);

}  // namespace crashstat
