#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "covrec/baseline.hpp"
#include "covrec/recovery.hpp"

namespace covrec {

/// A benchmark scenario: damaged networks whose initial coverage fraction
/// lies in target +/- band.
struct Scenario {
    std::string label;
    double target = 0.2;
    double band = 0.025;
    Domain domain{1.0};
    double radius = 0.25;
    int replications = 200;
    std::uint64_t base_seed = 0;
};

inline std::vector<Scenario> make_scenarios(const std::vector<double>& targets, const Domain& d,
                                            double radius, int replications, std::uint64_t base_seed) {
    std::vector<Scenario> out;
    for (double t : targets) {
        if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("make_scenarios: target must be in (0,1)");
        Scenario s;
        s.label = std::to_string(static_cast<int>(std::lround(t * 100))) + "%";
        s.target = t;
        s.domain = d;
        s.radius = radius;
        s.replications = replications;
        s.base_seed = base_seed;
        out.push_back(std::move(s));
    }
    return out;
}

struct ScenarioDraw {
    std::vector<TaggedPoint> existing;
    double coverage = 0.0;
    int attempts = 0;
};

/// Draw an existing set whose coverage fraction lies in the scenario band.
/// The count starts at the Boolean-model estimate -ln(1-target) a^2/(pi r^2)
/// and is nudged toward the target after each miss. Deterministic per
/// (base seed, replication); after 1000 misses the band is widened with a
/// warning.
inline ScenarioDraw generate_scenario(const Scenario& s, int replication) {
    const double a = s.domain.side;
    const double disk = std::numbers::pi * s.radius * s.radius;
    int n = std::max(1, static_cast<int>(std::lround(-std::log1p(-s.target) * a * a / disk)));
    auto rng = make_engine(mix_seed(s.base_seed, 1000 + static_cast<std::uint64_t>(std::lround(s.target * 1000)),
                                    static_cast<std::uint64_t>(replication)));
    double band = s.band;
    ScenarioDraw draw;
    for (int attempt = 1;; ++attempt) {
        std::vector<Point2> pts;
        pts.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            pts.push_back({uniform01(rng) * a, uniform01(rng) * a});
        const double c = coverage_fraction(pts, s.radius, s.domain);
        if (std::abs(c - s.target) <= band) {
            draw.existing.reserve(pts.size());
            for (const auto& p : pts) draw.existing.push_back({p, Tag::Existing});
            draw.coverage = c;
            draw.attempts = attempt;
            return draw;
        }
        n = std::max(1, n + (c < s.target ? 1 : -1));
        if (attempt % 1000 == 0) {
            band *= 2.0;
            std::cerr << "generate_scenario: widening band to " << band << " for target "
                      << s.target << " (replication " << replication << ")\n";
        }
    }
}

enum class BenchStrategy { Grid, Uniform, Dpp, Greedy };

inline const char* to_string(BenchStrategy s) {
    switch (s) {
        case BenchStrategy::Grid: return "grid";
        case BenchStrategy::Uniform: return "uniform";
        case BenchStrategy::Dpp: return "dpp";
        case BenchStrategy::Greedy: return "greedy";
    }
    return "?";
}

struct BenchOptions {
    ComplexKind complex = ComplexKind::Rips;
    double greedy_stop_factor = 2.0;  // stop radius = factor * r (Rips-consistent coverage)
    int jobs = 1;
    int max_iterations = 30;
};

struct RunRecord {
    int scenario_idx = 0;
    int strategy_idx = 0;
    int replication = 0;
    int added = 0;
    int final_kept = 0;
    double initial_coverage = 0.0;
    int existing_count = 0;
    std::uint64_t seed = 0;
    bool failed = false;
};

struct BenchRow {
    std::string scenario;
    std::string strategy;
    double coverage_target = 0.0;
    int replications = 0;  // successful runs aggregated
    double mean_added = 0.0;
    double mean_final = 0.0;
    double stderr_final = 0.0;
    int failures = 0;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    std::vector<RunRecord> records;  // scenario-major, then strategy, then replication
};

namespace detail {

inline RunRecord bench_one(const Scenario& s, int scen_idx, BenchStrategy strat, int strat_idx,
                           int rep, std::uint64_t base_seed, const BenchOptions& opt) {
    RunRecord rec;
    rec.scenario_idx = scen_idx;
    rec.strategy_idx = strat_idx;
    rec.replication = rep;
    const ScenarioDraw draw = generate_scenario(s, rep);
    rec.initial_coverage = draw.coverage;
    rec.existing_count = static_cast<int>(draw.existing.size());
    rec.seed = mix_seed(base_seed, 2000 + static_cast<std::uint64_t>(scen_idx) * 16 + static_cast<std::uint64_t>(strat_idx),
                        static_cast<std::uint64_t>(rep));
    try {
        if (strat == BenchStrategy::Greedy) {
            GreedyConfig gc;
            gc.domain = s.domain;
            gc.radius = s.radius;
            gc.stop_radius = opt.greedy_stop_factor * s.radius;
            std::vector<Point2> pos;
            for (const auto& p : draw.existing) pos.push_back(p.pos);
            const auto added = greedy_cover(pos, gc);
            rec.added = rec.final_kept = static_cast<int>(added.size());
        } else {
            RecoveryConfig rc;
            rc.radius = s.radius;
            rc.domain = s.domain;
            rc.strategy.complex = opt.complex;
            rc.strategy.kind = (strat == BenchStrategy::Grid)      ? StrategyKind::Grid
                               : (strat == BenchStrategy::Uniform) ? StrategyKind::Uniform
                                                                   : StrategyKind::Determinantal;
            rc.seed = rec.seed;
            rc.max_iterations = opt.max_iterations;
            const RecoveryResult res = run_recovery(draw.existing, rc);
            rec.added = res.added_count();
            rec.final_kept = static_cast<int>(res.kept.size());
        }
    } catch (const std::runtime_error&) {
        rec.failed = true;
    }
    return rec;
}

}  // namespace detail

/// Monte Carlo benchmark over scenarios x strategies. Replications are
/// independent and run on `opt.jobs` threads; aggregation walks the records
/// in index order, so the output never depends on scheduling. Failed runs
/// (loop cap, degenerate sampler state) are excluded from the means and
/// counted.
inline BenchResult run_benchmark(const std::vector<Scenario>& scenarios,
                                 const std::vector<BenchStrategy>& strategies, int replications,
                                 std::uint64_t base_seed, const BenchOptions& opt = {}) {
    if (replications < 1) throw std::invalid_argument("run_benchmark: replications must be >= 1");
    BenchResult out;
    const std::size_t per_pair = static_cast<std::size_t>(replications);
    const std::size_t total = scenarios.size() * strategies.size() * per_pair;
    out.records.assign(total, {});

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= total) return;
            const std::size_t scen_idx = task / (strategies.size() * per_pair);
            const std::size_t rest = task % (strategies.size() * per_pair);
            const std::size_t strat_idx = rest / per_pair;
            const int rep = static_cast<int>(rest % per_pair);
            Scenario s = scenarios[scen_idx];
            s.replications = replications;
            s.base_seed = base_seed;
            out.records[task] = detail::bench_one(s, static_cast<int>(scen_idx), strategies[strat_idx],
                                                  static_cast<int>(strat_idx), rep, base_seed, opt);
        }
    };
    const int jobs = std::max(1, opt.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (std::size_t scen_idx = 0; scen_idx < scenarios.size(); ++scen_idx) {
        for (std::size_t strat_idx = 0; strat_idx < strategies.size(); ++strat_idx) {
            BenchRow row;
            row.scenario = scenarios[scen_idx].label;
            row.strategy = to_string(strategies[strat_idx]);
            row.coverage_target = scenarios[scen_idx].target;
            double sum_added = 0.0, sum_final = 0.0, sumsq_final = 0.0;
            int n = 0;
            for (int rep = 0; rep < replications; ++rep) {
                const auto& rec =
                    out.records[(scen_idx * strategies.size() + strat_idx) * per_pair + static_cast<std::size_t>(rep)];
                if (rec.failed) {
                    ++row.failures;
                    continue;
                }
                ++n;
                sum_added += rec.added;
                sum_final += rec.final_kept;
            }
            row.replications = n;
            if (n > 0) {
                row.mean_added = sum_added / n;
                row.mean_final = sum_final / n;
                for (int rep = 0; rep < replications; ++rep) {
                    const auto& rec =
                        out.records[(scen_idx * strategies.size() + strat_idx) * per_pair + static_cast<std::size_t>(rep)];
                    if (!rec.failed) sumsq_final += (rec.final_kept - row.mean_final) * (rec.final_kept - row.mean_final);
                }
                if (n > 1) row.stderr_final = std::sqrt(sumsq_final / (n - 1)) / std::sqrt(static_cast<double>(n));
            }
            if (row.failures > 0)
                std::cerr << "run_benchmark: " << row.failures << " failed runs excluded for "
                          << row.scenario << "/" << row.strategy << "\n";
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

/// Fixed-header CSV; format is stable so identical seeds give identical bytes.
inline std::string to_csv(const std::vector<BenchRow>& rows) {
    std::string out = "scenario,strategy,reps,mean_added,mean_final,stderr\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%s,%d,%.4f,%.4f,%.4f\n", r.scenario.c_str(),
                      r.strategy.c_str(), r.replications, r.mean_added, r.mean_final, r.stderr_final);
        out += buf;
    }
    return out;
}

/// Per-strategy plot data: x = scenario coverage target, y = means.
inline std::string to_plot_data(const std::vector<BenchRow>& rows, const std::string& strategy) {
    std::string out = "# coverage mean_added mean_final stderr\n";
    char buf[256];
    for (const auto& r : rows) {
        if (r.strategy != strategy) continue;
        std::snprintf(buf, sizeof buf, "%.4f %.4f %.4f %.4f\n", r.coverage_target, r.mean_added,
                      r.mean_final, r.stderr_final);
        out += buf;
    }
    return out;
}

}  // namespace covrec
