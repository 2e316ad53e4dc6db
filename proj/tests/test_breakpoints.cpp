#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "crashstat/breakpoints.hpp"
#include "crashstat/errors.hpp"
#include "crashstat/synth.hpp"
#include "test_util.hpp"

using namespace crashstat;
using testutil::make_series;

namespace {

// Independent SSR oracle: recursive-residual accumulation
// ssr(i, j) = ssr(i, j-1) + v(i, j)^2 with the standardized one-step residual
// v(i, j) = (y_j - mean(y_i..y_{j-1})) / sqrt(1 + 1/(j - i)).
double recursive_ssr(const std::vector<double>& y, int i, int j) {
    double ssr = 0.0;
    double mean = y[i];
    for (int t = i + 1; t <= j; ++t) {
        const double k = static_cast<double>(t - i);  // points already in the fit
        const double v = (y[t] - mean) / std::sqrt(1.0 + 1.0 / k);
        ssr += v * v;
        mean += (y[t] - mean) / (k + 1.0);
    }
    return ssr;
}

std::vector<double> random_values(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> y(n);
    for (double& v : y) v = dist(rng);
    return y;
}

}  // namespace

TEST_CASE("segment SSR closed form") {
    SUBCASE("constant series has zero SSR everywhere") {
        const std::vector<double> y{5.0, 5.0, 5.0, 5.0};
        const SsrTable t(y, 1);
        for (int i = 0; i < 4; ++i) {
            for (int j = i; j < 4; ++j) CHECK(t.ssr(i, j) == 0.0);
        }
    }
    SUBCASE("two points") {
        const std::vector<double> y{0.0, 1.0};
        const SsrTable t(y, 1);
        CHECK(t.ssr(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(t.mean(0, 1) == 0.5);
        const auto stats = t.stats(0, 1);
        CHECK(stats.start_index == 0);
        CHECK(stats.end_index == 1);
        CHECK(stats.ssr == t.ssr(0, 1));
    }
    SUBCASE("prefix-sum SSR equals recursive-residual accumulation") {
        const auto y = random_values(40, 17);
        const SsrTable t(y, 1);
        std::mt19937 rng(99);
        std::uniform_int_distribution<int> pick(0, 39);
        for (int trial = 0; trial < 200; ++trial) {
            int i = pick(rng), j = pick(rng);
            if (i > j) std::swap(i, j);
            CHECK(t.ssr(i, j) ==
                  doctest::Approx(recursive_ssr(y, i, j)).epsilon(1e-9));
        }
    }
    SUBCASE("preconditions") {
        const std::vector<double> y{1.0, 2.0, 3.0};
        CHECK_THROWS_AS(SsrTable(y, 0), InputError);
        CHECK_THROWS_AS(SsrTable(y, 2), InfeasibleError);
    }
}

TEST_CASE("optimal_partition finds a perfect step") {
    const std::vector<double> y{0, 0, 0, 0, 10, 10, 10, 10};
    const auto r = optimal_partition(y, 1, 2);
    REQUIRE(r.break_indices.size() == 1);
    CHECK(r.break_indices[0] == 3);
    CHECK(r.total_ssr == 0.0);
    REQUIRE(r.per_m_ssr.size() == 2);
    CHECK(r.per_m_ssr[0] == doctest::Approx(200.0).epsilon(1e-12));
    CHECK(r.per_m_ssr[1] == 0.0);
}

TEST_CASE("ties resolve to the lexicographically smallest break vector") {
    const std::vector<double> y(9, 4.2);
    const auto r1 = optimal_partition(y, 1, 3);
    CHECK(r1.total_ssr == 0.0);
    CHECK(r1.break_indices == std::vector<int>{2});
    const auto r2 = optimal_partition(y, 2, 3);
    CHECK(r2.break_indices == std::vector<int>{2, 5});
}

TEST_CASE("dynamic program equals exhaustive enumeration") {
    for (unsigned seed = 0; seed < 8; ++seed) {
        const auto y = random_values(30, 100 + seed);
        for (int m : {1, 2, 3}) {
            const auto dp = optimal_partition(y, m, 4);
            const auto bf = brute_force_partition(y, m, 4);
            CHECK(dp.total_ssr == bf.total_ssr);  // exact, same association order
            CHECK(dp.break_indices == bf.break_indices);
            CHECK(dp.per_m_ssr == bf.per_m_ssr);

            // admissibility: strictly increasing, every segment >= h_min
            int prev = -1;
            for (int k : dp.break_indices) {
                CHECK(k - prev >= 4);
                prev = k;
            }
            CHECK(static_cast<int>(y.size()) - 1 - prev >= 4);  // final segment
        }
    }
}

TEST_CASE("per-m SSR is non-increasing in the number of breaks") {
    const auto y = random_values(60, 5);
    const auto r = optimal_partition(y, 4, 5);
    REQUIRE(r.per_m_ssr.size() == 5);
    for (std::size_t j = 1; j < r.per_m_ssr.size(); ++j) {
        CHECK(r.per_m_ssr[j] <= r.per_m_ssr[j - 1]);
    }
}

TEST_CASE("breaks are equivariant under affine transforms of the data") {
    const auto y = random_values(50, 42);
    const auto base = optimal_partition(y, 2, 5);
    for (const auto& [a, b] : {std::pair{2.5, 10.0}, std::pair{-3.0, 1.0},
                              std::pair{0.01, -7.0}}) {
        auto z = y;
        for (double& v : z) v = a * v + b;
        const auto r = optimal_partition(z, 2, 5);
        CHECK(r.break_indices == base.break_indices);
        CHECK(r.total_ssr == doctest::Approx(a * a * base.total_ssr).epsilon(1e-9));
    }
}

TEST_CASE("breaks of a reversed series mirror when the optimum is unique") {
    auto y = random_values(36, 8);
    for (std::size_t i = 12; i < 24; ++i) y[i] += 8.0;  // two sharp edges
    const auto fwd = optimal_partition(y, 2, 4);

    auto rev = y;
    std::reverse(rev.begin(), rev.end());
    const auto bwd = optimal_partition(rev, 2, 4);

    std::vector<int> mirrored;
    for (auto it = bwd.break_indices.rbegin(); it != bwd.break_indices.rend(); ++it) {
        mirrored.push_back(static_cast<int>(y.size()) - 2 - *it);
    }
    CHECK(mirrored == fwd.break_indices);
    CHECK(bwd.total_ssr == doctest::Approx(fwd.total_ssr).epsilon(1e-9));
}

TEST_CASE("optimal_partition rejects infeasible configurations") {
    const std::vector<double> y(10, 1.0);
    CHECK_THROWS_AS(optimal_partition(y, 4, 3), InfeasibleError);
    CHECK_THROWS_AS(optimal_partition(y, -1, 2), InputError);
    CHECK_THROWS_AS(optimal_partition(y, 1, 0), InputError);
    CHECK_NOTHROW(optimal_partition(y, 0, 10));
}

namespace {

// Flat 100 for 120 days, linear fall to 60 over 10, flat 60 for 60,
// linear rise back to 100 over 120.
std::vector<double> crash_and_recovery_shape() {
    std::vector<double> closes;
    for (int i = 0; i < 120; ++i) closes.push_back(100.0);
    for (int i = 1; i <= 10; ++i) closes.push_back(100.0 - 4.0 * i);
    for (int i = 0; i < 60; ++i) closes.push_back(60.0);
    for (int i = 1; i <= 120; ++i) closes.push_back(60.0 + 40.0 * i / 120.0);
    return closes;
}

}  // namespace

TEST_CASE("influence window brackets the fall-to-recovery span") {
    const auto series = make_series(crash_and_recovery_shape());
    const auto shocks = detect_shocks(series);
    const auto main = identify_mainshock(shocks);
    CHECK(main.start_index == 119);
    CHECK(main.duration_days == 10);
    CHECK(main.magnitude == doctest::Approx(0.22184874961635637).epsilon(1e-12));

    const auto w = influence_window(series, main);
    CHECK_FALSE(w.open_ended);
    const auto start_idx = *series.index_of(w.window_start);
    const auto end_idx = *series.index_of(w.window_end);
    CHECK(std::llabs(static_cast<long long>(start_idx) - 119) <= 5);
    CHECK(end_idx > 129);          // after the trough
    CHECK(end_idx >= 180);         // inside the recovery, not the crash floor
    CHECK(end_idx < 300);
}

TEST_CASE("downscaled window shape agrees with brute force") {
    std::vector<double> closes;
    for (int i = 0; i < 12; ++i) closes.push_back(100.0);
    for (int i = 1; i <= 4; ++i) closes.push_back(100.0 - 10.0 * i);
    for (int i = 0; i < 6; ++i) closes.push_back(60.0);
    for (int i = 1; i <= 9; ++i) closes.push_back(60.0 + 4.0 * i);
    const auto dp = optimal_partition(closes, 3, 3);
    const auto bf = brute_force_partition(closes, 3, 3);
    CHECK(dp.break_indices == bf.break_indices);
    CHECK(dp.total_ssr == bf.total_ssr);
    // first break within 2 days of the fall onset (peak at index 11)
    CHECK(std::abs(dp.break_indices[0] - 11) <= 2);
}

TEST_CASE("a crash with no recovery yields an open-ended window") {
    std::vector<double> closes(200, 100.0);
    for (int i = 1; i <= 10; ++i) closes.push_back(100.0 - 4.0 * i);
    const auto series = make_series(closes);
    const auto main = identify_mainshock(detect_shocks(series));
    CHECK(main.start_index == 199);

    const auto w = influence_window(series, main);
    CHECK(w.open_ended);
    CHECK(w.window_end == series.last_date());
    CHECK(w.breaks.open_ended);
}

TEST_CASE("a mainshock far from all structure is rejected") {
    std::vector<double> closes;
    for (int i = 0; i < 6; ++i) closes.push_back(100.0);
    for (int i = 0; i < 6; ++i) closes.push_back(1000.0);
    for (int i = 0; i < 6; ++i) closes.push_back(100.0);
    for (int i = 0; i < 38; ++i) closes.push_back(1000.0);
    closes.push_back(950.0);
    closes.push_back(920.0);
    for (int i = 0; i < 4; ++i) closes.push_back(1000.0);
    const auto series = make_series(closes);
    const auto shocks = detect_shocks(series);
    REQUIRE(!shocks.empty());
    Shock small_crash;
    bool found = false;
    for (const auto& s : shocks) {
        if (s.peak_price == 1000.0 && s.trough_price == 920.0) {
            small_crash = s;
            found = true;
        }
    }
    REQUIRE(found);
    CHECK_THROWS_AS(influence_window(series, small_crash, 3, 0.10), InfeasibleError);
}

TEST_CASE("influence_window validates that the shock belongs to the series") {
    const auto series = make_series(crash_and_recovery_shape());
    const auto other = make_series({50.0, 45.0, 40.0});
    const auto foreign = detect_shocks(other)[0];
    CHECK_THROWS_AS(influence_window(series, foreign), InputError);
}

TEST_CASE("break result serializes to the documented JSON shape") {
    const auto series = make_series(crash_and_recovery_shape());
    const auto main = identify_mainshock(detect_shocks(series));
    const auto w = influence_window(series, main, 3, 0.10, true);  // log-price variant
    const auto json = break_result_to_json(w.breaks);
    for (const char* key :
         {"\"m\"", "\"break_dates\"", "\"total_ssr\"", "\"per_m_ssr\"", "\"open_ended\""}) {
        CHECK(json.find(key) != std::string::npos);
    }
}
