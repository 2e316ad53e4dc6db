#include "crashstat/synth.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crashstat/errors.hpp"

namespace crashstat {

namespace {

// mt19937_64 output is bit-specified by the standard; the distribution
// algorithms are not. Deriving uniforms and normals directly from the raw
// stream keeps generated fixtures identical across standard libraries.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace

void SynthSpec::validate() const {
    if (n_days < 2) throw InputError("synth spec: n_days must be >= 2");
    if (!(base_price > 0.0)) throw InputError("synth spec: base_price must be > 0");
    if (volatility < 0.0) throw InputError("synth spec: volatility must be >= 0");
    if (reversion < 0.0 || reversion > 1.0) {
        throw InputError("synth spec: reversion must be in [0, 1]");
    }
    int prev_index = 0;
    for (const PlantedBreak& b : planted_breaks) {
        if (b.index <= 0 || b.index >= n_days) {
            throw InputError("synth spec: break index out of range");
        }
        if (!planted_breaks.empty() && &b != &planted_breaks.front() && b.index <= prev_index) {
            throw InputError("synth spec: break indices must be strictly increasing");
        }
        if (!(b.level > 0.0)) throw InputError("synth spec: break level must be > 0");
        prev_index = b.index;
    }
    int prev_end = std::numeric_limits<int>::min();
    for (const PlantedShock& s : planted_shocks) {
        if (!(s.magnitude > 0.0)) throw InputError("synth spec: shock magnitude must be > 0");
        if (s.duration_days < 1) throw InputError("synth spec: shock duration must be >= 1");
        if (s.start_index < 1 || s.start_index + s.duration_days > n_days - 1) {
            throw InputError("synth spec: shock run out of range");
        }
        if (s.start_index < prev_end + 2) {
            throw InputError("synth spec: shocks overlap or touch");
        }
        prev_end = s.start_index + s.duration_days;
    }
}

PriceSeries generate(const SynthSpec& spec) {
    spec.validate();
    const int n = spec.n_days;
    SeededRng rng(spec.seed);

    std::vector<double> level(n, std::log10(spec.base_price));
    {
        std::size_t b = 0;
        double current = std::log10(spec.base_price);
        for (int t = 0; t < n; ++t) {
            while (b < spec.planted_breaks.size() && spec.planted_breaks[b].index == t) {
                current = std::log10(spec.planted_breaks[b].level);
                ++b;
            }
            level[t] = current;
        }
    }

    std::vector<double> x(n);
    x[0] = level[0];
    double deviation = 0.0;

    std::size_t next_shock = 0;
    int run_start = -1, run_end = -1, exit_guard = -1;
    std::vector<double> run_path;

    for (int t = 1; t < n; ++t) {
        if (run_start >= 0 && t <= run_end) {
            x[t] = run_path[static_cast<std::size_t>(t - run_start)];
            deviation = x[t] - level[t] - spec.drift * t;
            continue;
        }
        deviation = (1.0 - spec.reversion) * deviation + spec.volatility * rng.normal();
        x[t] = level[t] + spec.drift * t + deviation;
        if (t == exit_guard && x[t] < x[t - 1]) {
            x[t] = x[t - 1];  // equal close: ends the planted run without extending it
        }
        if (next_shock < spec.planted_shocks.size() &&
            t == spec.planted_shocks[next_shock].start_index) {
            const PlantedShock& s = spec.planted_shocks[next_shock];
            if (x[t] < x[t - 1]) x[t] = x[t - 1];  // peak guard: no merge with a prior decline
            run_start = t;
            run_end = t + s.duration_days;
            exit_guard = run_end + 1;
            run_path.assign(static_cast<std::size_t>(s.duration_days) + 1, x[t]);
            std::vector<double> weight(static_cast<std::size_t>(s.duration_days));
            double total = 0.0;
            for (double& w : weight) {
                w = 0.7 + 0.6 * rng.uniform();
                total += w;
            }
            double cum = 0.0;
            for (int i = 1; i <= s.duration_days; ++i) {
                cum += weight[static_cast<std::size_t>(i - 1)];
                run_path[static_cast<std::size_t>(i)] = x[t] - s.magnitude * cum / total;
            }
            run_path.back() = x[t] - s.magnitude;  // trough exact
            ++next_shock;
        }
        deviation = x[t] - level[t] - spec.drift * t;
    }

    std::vector<double> closes(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        closes[i] = std::pow(10.0, x[i]);
    }
    return PriceSeries(spec.ticker, weekday_calendar(spec.start_date, static_cast<std::size_t>(n)),
                       std::move(closes));
}

std::vector<double> sample_gr_magnitudes(double alpha, double beta, int n, double m_min,
                                         std::uint64_t seed) {
    (void)alpha;
    if (!(beta > 0.0)) throw InputError("beta must be > 0");
    if (n < 1) throw InputError("n must be >= 1");
    if (!(m_min > 0.0)) throw InputError("m_min must be > 0");
    SeededRng rng(seed);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double u = 1.0 - rng.uniform();  // (0, 1]
        out.push_back(m_min - std::log10(u) / beta);
    }
    return out;
}

namespace {

struct BruteState {
    const SsrTable* table;
    int n, m, h_min;
    std::vector<int> current;
    std::vector<int> best;
    double best_cost = std::numeric_limits<double>::infinity();

    double partition_cost() const {
        // Right-associated, matching the dynamic program's recursion order.
        double acc = table->ssr(current[static_cast<std::size_t>(m - 1)] + 1, n - 1);
        for (int t = m - 1; t >= 1; --t) {
            acc = table->ssr(current[static_cast<std::size_t>(t - 1)] + 1,
                             current[static_cast<std::size_t>(t)]) +
                  acc;
        }
        return table->ssr(0, current[0]) + acc;
    }

    void recurse(int depth, int min_index) {
        if (depth == m) {
            const double cost = partition_cost();
            if (cost < best_cost) {  // strict: lexicographically first optimum wins
                best_cost = cost;
                best = current;
            }
            return;
        }
        const int remaining = m - depth;  // breaks still to place after this one
        for (int k = min_index; k + remaining * h_min <= n - 1; ++k) {
            current[static_cast<std::size_t>(depth)] = k;
            recurse(depth + 1, k + h_min);
        }
    }
};

}  // namespace

BreakResult brute_force_partition(std::span<const double> y, int m, int h_min) {
    const int n = static_cast<int>(y.size());
    if (n > 40) {
        throw InputError("brute-force partition is guarded to n <= 40");
    }
    if (m < 0) throw InputError("number of breaks must be >= 0");
    if (h_min < 1) throw InputError("h_min must be >= 1");
    if ((m + 1) * h_min > n) {
        throw InfeasibleError("infeasible brute-force partition");
    }

    const SsrTable table(y, 1);
    BreakResult result;
    result.m = m;
    if (m == 0) {
        result.total_ssr = table.ssr(0, n - 1);
        result.per_m_ssr = {result.total_ssr};
        return result;
    }

    BruteState state{&table, n, m, h_min, std::vector<int>(static_cast<std::size_t>(m)), {},
                     std::numeric_limits<double>::infinity()};
    state.recurse(0, h_min - 1);
    result.break_indices = state.best;
    result.total_ssr = state.best_cost;
    for (int j = 0; j < m; ++j) {
        result.per_m_ssr.push_back(brute_force_partition(y, j, h_min).total_ssr);
    }
    result.per_m_ssr.push_back(result.total_ssr);
    return result;
}

SynthSpec SynthSpec::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("synth spec: ") + e.what());
    }
    SynthSpec spec;
    try {
        spec.n_days = j.at("n_days").get<int>();
        spec.base_price = j.at("base_price").get<double>();
        spec.seed = j.value("seed", std::uint64_t{0});
        spec.drift = j.value("drift", 0.0);
        spec.volatility = j.value("volatility", 0.0);
        spec.reversion = j.value("reversion", 0.05);
        spec.ticker = j.value("ticker", std::string("SYNTH"));
        if (j.contains("start_date")) {
            spec.start_date = parse_date(j.at("start_date").get<std::string>());
        }
        for (const auto& b : j.value("planted_breaks", nlohmann::json::array())) {
            spec.planted_breaks.push_back(
                PlantedBreak{b.at("index").get<int>(), b.at("level").get<double>()});
        }
        for (const auto& s : j.value("planted_shocks", nlohmann::json::array())) {
            spec.planted_shocks.push_back(PlantedShock{s.at("start_index").get<int>(),
                                                       s.at("magnitude").get<double>(),
                                                       s.at("duration_days").get<int>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("synth spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

SynthSpec SynthSpec::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string SynthSpec::to_json() const {
    nlohmann::ordered_json j;
    j["n_days"] = n_days;
    j["base_price"] = base_price;
    j["drift"] = drift;
    j["volatility"] = volatility;
    j["reversion"] = reversion;
    j["start_date"] = format_date(start_date);
    j["ticker"] = ticker;
    j["seed"] = seed;
    auto breaks = nlohmann::ordered_json::array();
    for (const PlantedBreak& b : planted_breaks) {
        breaks.push_back({{"index", b.index}, {"level", b.level}});
    }
    j["planted_breaks"] = std::move(breaks);
    auto shocks = nlohmann::ordered_json::array();
    for (const PlantedShock& s : planted_shocks) {
        shocks.push_back({{"start_index", s.start_index},
                          {"magnitude", s.magnitude},
                          {"duration_days", s.duration_days}});
    }
    j["planted_shocks"] = std::move(shocks);
    return j.dump(2);
}

void SynthSpec::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << to_json() << '\n';
}

}  // namespace crashstat
