#include <doctest.h>

#include <cmath>
#include <random>

#include "crashstat/errors.hpp"
#include "crashstat/shocks.hpp"
#include "test_util.hpp"

using namespace crashstat;
using testutil::make_series;
using testutil::make_shock;

TEST_CASE("monotone rise has no shocks") {
    CHECK(detect_shocks(make_series({1.0, 2.0, 3.0, 4.0})).empty());
    CHECK_THROWS_AS(detect_shocks(make_series({5.0})), InfeasibleError);
}

TEST_CASE("detect_shocks enumerates maximal decline runs") {
    const auto series = make_series({100.0, 90.0, 80.0, 85.0, 80.0});
    const auto shocks = detect_shocks(series);
    REQUIRE(shocks.size() == 2);

    CHECK(shocks[0].start_index == 0);
    CHECK(shocks[0].end_index == 2);
    CHECK(shocks[0].peak_price == 100.0);
    CHECK(shocks[0].trough_price == 80.0);
    CHECK(shocks[0].duration_days == 2);
    CHECK(shocks[0].magnitude == doctest::Approx(0.09691001300805642).epsilon(1e-12));
    CHECK(shocks[0].pct_fall == doctest::Approx(0.2).epsilon(1e-12));

    CHECK(shocks[1].start_index == 3);
    CHECK(shocks[1].end_index == 4);
    CHECK(shocks[1].peak_price == 85.0);
    CHECK(shocks[1].duration_days == 1);
    CHECK(shocks[1].magnitude == doctest::Approx(0.026328938722349145).epsilon(1e-12));
}

TEST_CASE("an equal close terminates a run") {
    const auto shocks = detect_shocks(make_series({100.0, 95.0, 95.0, 90.0}));
    REQUIRE(shocks.size() == 2);
    CHECK(shocks[0].duration_days == 1);
    CHECK(shocks[1].duration_days == 1);
    CHECK(shocks[1].peak_price == 95.0);
}

TEST_CASE("every negative return lies inside exactly one shock") {
    for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
        const auto series = make_series(testutil::random_walk_closes(250, seed, 0.02));
        const auto shocks = detect_shocks(series);

        std::vector<int> cover(series.size(), 0);
        std::size_t prev_end = 0;
        for (std::size_t k = 0; k < shocks.size(); ++k) {
            const auto& s = shocks[k];
            if (k > 0) CHECK(s.start_index >= prev_end);  // non-overlapping, date order
            prev_end = s.end_index;
            for (std::size_t i = s.start_index + 1; i <= s.end_index; ++i) {
                CHECK(series.close(i) < series.close(i - 1));
                cover[i] += 1;
            }
        }
        for (std::size_t i = 1; i < series.size(); ++i) {
            const bool declining = series.close(i) < series.close(i - 1);
            CHECK(cover[i] == (declining ? 1 : 0));
        }
    }
}

TEST_CASE("shock magnitude equals the negated log-return sum over its run") {
    const auto series = make_series(testutil::random_walk_closes(300, 9, 0.03));
    const auto returns = log_returns(series);
    for (const auto& s : detect_shocks(series)) {
        double sum = 0.0;
        for (std::size_t i = s.start_index; i < s.end_index; ++i) sum += returns.values[i];
        CHECK(s.magnitude == doctest::Approx(-sum).epsilon(1e-12));
        CHECK(s.pct_fall ==
              doctest::Approx(1.0 - std::pow(10.0, -s.magnitude)).epsilon(1e-12));
    }
}

TEST_CASE("shock statistics are scale invariant") {
    const auto base = testutil::random_walk_closes(200, 21, 0.02);
    const auto reference = detect_shocks(make_series(base));
    for (double c : {0.5, 3.7, 10000.0}) {
        auto scaled = base;
        for (double& v : scaled) v *= c;
        const auto shocks = detect_shocks(make_series(scaled));
        REQUIRE(shocks.size() == reference.size());
        for (std::size_t i = 0; i < shocks.size(); ++i) {
            CHECK(shocks[i].start_index == reference[i].start_index);
            CHECK(shocks[i].end_index == reference[i].end_index);
            CHECK(shocks[i].duration_days == reference[i].duration_days);
            CHECK(shocks[i].magnitude ==
                  doctest::Approx(reference[i].magnitude).epsilon(1e-12));
            CHECK(shocks[i].pct_fall ==
                  doctest::Approx(reference[i].pct_fall).epsilon(1e-12));
        }
    }
}

TEST_CASE("identify_mainshock picks the maximum magnitude") {
    const auto d = weekday_calendar(make_date(2020, 1, 6), 40);
    const auto a = make_shock(d[0], d[1], 100.0, 95.5);   // M ~ 0.02
    const auto b = make_shock(d[5], d[8], 100.0, 77.6);   // M ~ 0.11
    const auto c = make_shock(d[12], d[13], 100.0, 89.1); // M ~ 0.05

    SUBCASE("singleton") {
        const std::vector<Shock> one{a};
        CHECK(identify_mainshock(one).start_date == a.start_date);
    }
    SUBCASE("argmax") {
        const std::vector<Shock> all{a, b, c};
        CHECK(identify_mainshock(all).start_date == b.start_date);
    }
    SUBCASE("tie breaks to the earliest start") {
        const auto b2 = make_shock(d[20], d[22], 100.0, 77.6);
        const std::vector<Shock> all{a, b, b2};
        CHECK(identify_mainshock(all).start_date == b.start_date);
    }
    SUBCASE("search window restricts candidates") {
        const std::vector<Shock> all{a, b, c};
        const auto main = identify_mainshock(all, DateRange{d[10], d[20]});
        CHECK(main.start_date == c.start_date);
        CHECK_THROWS_AS(identify_mainshock(all, DateRange{d[30], d[35]}), InfeasibleError);
    }
    SUBCASE("empty list") {
        CHECK_THROWS_AS(identify_mainshock(std::vector<Shock>{}), InfeasibleError);
    }
}

TEST_CASE("filter_aftershocks applies the inclusive 7% threshold") {
    const auto d = weekday_calendar(make_date(2020, 1, 6), 60);
    Shock main = make_shock(d[0], d[2], 100.0, std::pow(10.0, -0.10) * 100.0);  // M = 0.10
    main.magnitude = 0.10;
    main.pct_fall = 1.0 - std::pow(10.0, -0.10);

    auto candidate = [&](std::size_t day, double magnitude) {
        auto s = make_shock(d[day], d[day + 1], 100.0, std::pow(10.0, -magnitude) * 100.0);
        s.magnitude = magnitude;
        return s;
    };
    const std::vector<Shock> shocks{main, candidate(5, 0.006), candidate(10, 0.007),
                                    candidate(15, 0.05)};

    SUBCASE("boundary magnitude survives, below-boundary does not") {
        const auto after = filter_aftershocks(shocks, main, d[50]);
        REQUIRE(after.size() == 2);
        CHECK(after[0].magnitude == 0.007);
        CHECK(after[1].magnitude == 0.05);
    }
    SUBCASE("window end cuts candidates by start date") {
        const auto after = filter_aftershocks(shocks, main, d[12]);
        REQUIRE(after.size() == 1);
        CHECK(after[0].magnitude == 0.007);
        CHECK(filter_aftershocks(shocks, main, d[4]).empty());
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(filter_aftershocks(shocks, main, d[50], 0.0), InputError);
        CHECK_THROWS_AS(filter_aftershocks(shocks, main, d[50], 1.0), InputError);
        CHECK_THROWS_AS(filter_aftershocks(shocks, main, d[1]), InputError);
    }
}

TEST_CASE("raising the threshold never adds aftershocks") {
    const auto series = make_series(testutil::random_walk_closes(400, 33, 0.02));
    const auto shocks = detect_shocks(series);
    const auto main = identify_mainshock(shocks);
    const auto window_end = series.last_date();
    if (window_end <= main.end_date) return;  // mainshock at the very end; nothing to check

    std::vector<Shock> prev;
    bool first = true;
    for (double ratio : {0.01, 0.05, 0.07, 0.2, 0.5, 0.9}) {
        const auto cur = filter_aftershocks(shocks, main, window_end, ratio);
        if (!first) {
            CHECK(cur.size() <= prev.size());
            for (const auto& s : cur) {
                bool found = false;
                for (const auto& p : prev) found = found || p.start_date == s.start_date;
                CHECK(found);
            }
        }
        prev = cur;
        first = false;
    }
}

TEST_CASE("shock serialization carries the documented fields") {
    const auto series = make_series({100.0, 90.0, 80.0, 85.0, 80.0});
    const auto shocks = detect_shocks(series);
    const auto csv = shocks_to_csv(shocks);
    CHECK(csv.find("start_date,end_date,peak,trough,duration,magnitude,pct_fall") == 0);
    CHECK(csv.find("2020-01-06,2020-01-08,100,80,2,") != std::string::npos);
    const auto json = shocks_to_json(shocks);
    CHECK(json.find("\"magnitude\"") != std::string::npos);
    CHECK(json.find("2020-01-09") != std::string::npos);
}
