#pragma once

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "covrec/baseline.hpp"
#include "covrec/harness.hpp"
#include "covrec/io.hpp"
#include "covrec/recovery.hpp"

namespace covrec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;      // malformed file, bad flag values
inline constexpr int kExitAlgorithm = 3;  // loop cap, degenerate sampler state

namespace detail {

inline void emit(const std::optional<std::string>& out_path, const std::string& contents) {
    if (out_path)
        write_file(*out_path, contents);
    else
        std::cout << contents;
}

inline std::vector<double> parse_targets(const std::string& spec) {
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            const double pct = std::stod(item);
            if (!(pct > 0.0 && pct < 100.0)) throw std::invalid_argument(item);
            out.push_back(pct / 100.0);
        } catch (const std::exception&) {
            throw io_error("--scenarios: expected comma-separated percentages, got '" + item + "'");
        }
    }
    if (out.empty()) throw io_error("--scenarios: empty list");
    return out;
}

inline std::vector<BenchStrategy> parse_strategies(const std::string& spec) {
    std::vector<BenchStrategy> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "grid") out.push_back(BenchStrategy::Grid);
        else if (item == "uniform") out.push_back(BenchStrategy::Uniform);
        else if (item == "dpp") out.push_back(BenchStrategy::Dpp);
        else if (item == "greedy") out.push_back(BenchStrategy::Greedy);
        else throw io_error("--strategies: unknown strategy '" + item + "'");
    }
    if (out.empty()) throw io_error("--strategies: empty list");
    return out;
}

struct SharedFlags {
    std::string in_path;
    std::optional<std::string> out_path;
    double radius = 0.25;
    double side = 1.0;
    std::string complex = "rips";
    std::string strategy = "dpp";
    std::uint64_t seed = 7;
    int jobs = 0;

    ComplexKind complex_kind() const {
        if (complex == "rips") return ComplexKind::Rips;
        if (complex == "cech") return ComplexKind::Cech;
        throw io_error("--complex: expected rips or cech");
    }
};

}  // namespace detail

inline int run(int argc, const char* const* argv) {
    CLI::App app{"homology-guided coverage recovery for planar wireless networks"};
    app.require_subcommand(1);

    detail::SharedFlags f;
    std::string out_path;

    // recover
    auto* recover = app.add_subcommand("recover", "repair a damaged network; emits kept/removed points");
    recover->add_option("--in", f.in_path, "network JSON file (defaults to an empty network)");
    auto* rec_out = recover->add_option("--out", out_path, "output JSON path (default stdout)");
    auto* rec_r = recover->add_option("--radius", f.radius, "coverage radius");
    auto* rec_a = recover->add_option("--side", f.side, "domain side length");
    auto* rec_k = recover->add_option("--complex", f.complex, "rips|cech")->check(CLI::IsMember({"rips", "cech"}));
    recover->add_option("--strategy", f.strategy, "grid|uniform|dpp|greedy")
        ->check(CLI::IsMember({"grid", "uniform", "dpp", "greedy"}));
    recover->add_option("--seed", f.seed, "RNG seed");
    double stop_radius = -1.0;
    recover->add_option("--stop-radius", stop_radius, "greedy stop radius (default: coverage radius)");
    bool with_trace = false;
    recover->add_flag("--trace", with_trace, "include the addition/reduction trace in the output");
    int max_iters = 30;
    recover->add_option("--max-iters", max_iters, "addition loop safety cap")->check(CLI::PositiveNumber);

    // bench
    auto* bench = app.add_subcommand("bench", "Monte Carlo benchmark; emits CSV rows per scenario/strategy");
    int reps = 200;
    std::uint64_t bench_seed = 42;
    std::string scenarios_spec = "20,40,60,80";
    std::string strategies_spec = "uniform,dpp";
    std::string json_path, plot_prefix;
    double greedy_stop_factor = 2.0;
    bench->add_option("--reps", reps, "replications per scenario/strategy");
    bench->add_option("--seed", bench_seed, "base seed");
    bench->add_option("--scenarios", scenarios_spec, "comma-separated initial-coverage percentages");
    bench->add_option("--strategies", strategies_spec, "comma-separated: grid,uniform,dpp,greedy");
    auto* bench_out = bench->add_option("--out", out_path, "CSV path (default stdout)");
    bench->add_option("--json", json_path, "also write per-run records as JSON");
    bench->add_option("--plot", plot_prefix, "also write per-strategy plot data files <prefix>_<strategy>.dat");
    bench->add_option("--radius", f.radius, "coverage radius");
    bench->add_option("--side", f.side, "domain side length");
    bench->add_option("--complex", f.complex, "rips|cech")->check(CLI::IsMember({"rips", "cech"}));
    bench->add_option("--greedy-stop-factor", greedy_stop_factor, "greedy stop radius as a multiple of r");
    bench->add_option("--jobs", f.jobs, "worker threads (0 = hardware)");

    // sample
    auto* sample = app.add_subcommand("sample", "draw Ginibre points, optionally conditioned on a network");
    int n_points = 0;
    std::string condition_path;
    sample->add_option("-n,--count", n_points, "number of points to draw");
    sample->add_option("--seed", f.seed, "RNG seed");
    sample->add_option("--condition", condition_path, "network JSON whose existing points condition the draw");
    sample->add_option("--side", f.side, "domain side length (when no conditioning file)");
    auto* sample_out = sample->add_option("--out", out_path, "output path (default stdout)");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "report Betti numbers and coverage of a network file");
    inspect->add_option("--in", f.in_path, "network JSON file")->required();
    bool no_boundary = false;
    inspect->add_flag("--no-boundary", no_boundary, "do not auto-generate boundary vertices");
    int resolution = 200;
    inspect->add_option("--resolution", resolution, "coverage sample lattice resolution");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitInput;
    }

    try {
        if (recover->parsed()) {
            NetworkFile net;
            if (!f.in_path.empty()) net = load_network(f.in_path);
            if (rec_r->count()) net.r = f.radius;
            if (rec_a->count()) net.a = f.side;
            if (rec_k->count()) net.kind = f.complex_kind();
            Domain domain(net.a);
            std::vector<TaggedPoint> existing;
            for (const auto& p : net.existing) existing.push_back({p, Tag::Existing});

            if (f.strategy == "greedy") {
                GreedyConfig gc;
                gc.domain = domain;
                gc.radius = net.r;
                gc.stop_radius = stop_radius > 0.0 ? stop_radius : net.r;
                const auto added = greedy_cover(net.existing, gc);
                nlohmann::json j;
                j["kept"] = points_json(added);
                detail::emit(rec_out->count() ? std::optional{out_path} : std::nullopt, j.dump(2) + "\n");
                return kExitOk;
            }

            RecoveryConfig rc;
            rc.radius = net.r;
            rc.domain = domain;
            rc.strategy.complex = net.kind;
            rc.strategy.kind = f.strategy == "grid"      ? StrategyKind::Grid
                               : f.strategy == "uniform" ? StrategyKind::Uniform
                                                         : StrategyKind::Determinantal;
            rc.seed = f.seed;
            rc.max_iterations = max_iters;
            rc.boundary = net.boundary;
            const RecoveryResult res = run_recovery(existing, rc);
            detail::emit(rec_out->count() ? std::optional{out_path} : std::nullopt,
                         serialize_recovery(res, with_trace));
            return kExitOk;
        }

        if (bench->parsed()) {
            if (reps < 1) throw io_error("--reps: must be >= 1");
            const auto targets = detail::parse_targets(scenarios_spec);
            const auto strategies = detail::parse_strategies(strategies_spec);
            const Domain domain(f.side);
            const auto scenarios = make_scenarios(targets, domain, f.radius, reps, bench_seed);
            BenchOptions opt;
            opt.complex = f.complex_kind();
            opt.greedy_stop_factor = greedy_stop_factor;
            opt.jobs = f.jobs > 0 ? f.jobs : static_cast<int>(std::thread::hardware_concurrency());
            const BenchResult result = run_benchmark(scenarios, strategies, reps, bench_seed, opt);
            detail::emit(bench_out->count() ? std::optional{out_path} : std::nullopt, to_csv(result.rows));
            if (!json_path.empty()) {
                nlohmann::json j;
                j["rows"] = nlohmann::json::array();
                for (const auto& r : result.rows)
                    j["rows"].push_back({{"scenario", r.scenario},
                                         {"strategy", r.strategy},
                                         {"reps", r.replications},
                                         {"mean_added", r.mean_added},
                                         {"mean_final", r.mean_final},
                                         {"stderr", r.stderr_final},
                                         {"failures", r.failures}});
                j["runs"] = nlohmann::json::array();
                for (const auto& rec : result.records)
                    j["runs"].push_back({{"scenario", scenarios[static_cast<std::size_t>(rec.scenario_idx)].label},
                                         {"strategy", to_string(strategies[static_cast<std::size_t>(rec.strategy_idx)])},
                                         {"rep", rec.replication},
                                         {"added", rec.added},
                                         {"final", rec.final_kept},
                                         {"initial_coverage", rec.initial_coverage},
                                         {"existing", rec.existing_count},
                                         {"seed", rec.seed},
                                         {"failed", rec.failed}});
                write_file(json_path, j.dump(2) + "\n");
            }
            if (!plot_prefix.empty()) {
                for (const auto& s : strategies)
                    write_file(plot_prefix + "_" + to_string(s) + ".dat", to_plot_data(result.rows, to_string(s)));
            }
            return kExitOk;
        }

        if (sample->parsed()) {
            if (n_points < 0) throw io_error("--count: must be >= 0");
            std::vector<Point2> conditioning;
            Domain domain(f.side);
            if (!condition_path.empty()) {
                const NetworkFile net = load_network(condition_path);
                conditioning = net.existing;
                domain = Domain(net.a);
            }
            const auto pts = sample_conditioned(n_points, conditioning, domain, f.seed);
            detail::emit(sample_out->count() ? std::optional{out_path} : std::nullopt, serialize_points(pts));
            return kExitOk;
        }

        if (inspect->parsed()) {
            const NetworkFile net = load_network(f.in_path);
            if (net.existing.empty())
                std::cerr << "warning: network has no existing vertices\n";
            Domain domain(net.a);
            std::vector<TaggedPoint> pts;
            for (const auto& p : net.existing) pts.push_back({p, Tag::Existing});
            if (!no_boundary) {
                if (net.boundary)
                    for (const auto& p : *net.boundary) pts.push_back({p, Tag::Boundary});
                else {
                    const auto bd = boundary_points(domain, net.r);
                    pts.insert(pts.end(), bd.begin(), bd.end());
                }
            }
            const auto complex = build_for(net.kind, pts, net.r);
            const BettiPair b = betti(complex);
            const double cov = coverage_fraction(net.existing, net.r, domain, resolution);
            std::ostringstream out;
            out << "beta0: " << b.beta0 << "\n"
                << "beta1: " << b.beta1 << "\n"
                << "vertices: " << complex.num_vertices() << "\n"
                << "edges: " << complex.num_edges() << "\n"
                << "triangles: " << complex.num_triangles() << "\n"
                << "coverage: " << cov << "\n";
            std::cout << out.str();
            return kExitOk;
        }
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const loop_cap_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAlgorithm;
    } catch (const over_constrained_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAlgorithm;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}

}  // namespace covrec::cli
