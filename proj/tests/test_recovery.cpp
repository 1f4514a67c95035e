#include <catch2/catch_amalgamated.hpp>

#include "covrec/recovery.hpp"
#include "oracles.hpp"

using namespace covrec;

namespace {

SimplicialComplex2 clique_complex(int n) {
    std::vector<SimplicialComplex2::Vertex> vs;
    std::vector<std::array<int, 2>> es;
    std::vector<std::array<int, 3>> ts;
    for (int i = 0; i < n; ++i) vs.push_back({i, {static_cast<double>(i), 0.0}, Tag::Added});
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) es.push_back({i, j});
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) ts.push_back({i, j, k});
    return SimplicialComplex2(std::move(vs), std::move(es), std::move(ts));
}

}  // namespace

TEST_CASE("triangle_degree on cliques") {
    CHECK(triangle_degree(clique_complex(3), {0, 1, 2}) == 2);  // the triangle itself
    CHECK(triangle_degree(clique_complex(4), {0, 1, 2}) == 3);  // tetrahedron
    CHECK(triangle_degree(clique_complex(5), {0, 1, 2}) == 4);
    CHECK_THROWS_AS(triangle_degree(clique_complex(3), {0, 1, 3}), std::invalid_argument);
}

TEST_CASE("max clique solver agrees with exhaustive search") {
    auto rng = make_engine(31);
    for (int round = 0; round < 150; ++round) {
        const int n = 2 + static_cast<int>(uniform01(rng) * 14);
        std::vector<std::vector<bool>> adj(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
        std::vector<detail::Bits> bits(static_cast<std::size_t>(n), detail::Bits((static_cast<std::size_t>(n) + 63) / 64, 0));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (uniform01(rng) < 0.5) {
                    adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = true;
                    bits[static_cast<std::size_t>(i)][static_cast<std::size_t>(j / 64)] |= 1ull << (j % 64);
                    bits[static_cast<std::size_t>(j)][static_cast<std::size_t>(i / 64)] |= 1ull << (i % 64);
                }
        detail::MaxCliqueSolver solver(bits, n);
        REQUIRE(solver.solve() == oracle::max_clique_brute(adj));
    }
}

TEST_CASE("vertex_index hand cases") {
    const auto tri = clique_complex(3);
    VertexIndex flags(3);
    CHECK(vertex_index(tri, 0, flags) == 2);

    // vertex 0 sits in a lone triangle {0,1,2} and in a 4-clique {0,3,4,5}
    SimplicialComplex2 both(
        {{0, {0, 0}, Tag::Added}, {1, {1, 0}, Tag::Added}, {2, {0, 1}, Tag::Added},
         {3, {2, 0}, Tag::Added}, {4, {2, 1}, Tag::Added}, {5, {3, 0}, Tag::Added}},
        {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {0, 4}, {0, 5}, {3, 4}, {3, 5}, {4, 5}},
        {{0, 1, 2}, {0, 3, 4}, {0, 3, 5}, {0, 4, 5}, {3, 4, 5}});
    VertexIndex flags6(6);
    CHECK(vertex_index(both, 0, flags6) == 2);  // the minimum of 2 and 3

    // triangle-free vertex gets index 0
    SimplicialComplex2 lone({{0, {0, 0}, Tag::Added}, {1, {1, 0}, Tag::Added}}, {{0, 1}}, {});
    VertexIndex flags2(2);
    CHECK(vertex_index(lone, 0, flags2) == 0);

    flags2.set(0, -1);
    CHECK(vertex_index(lone, 0, flags2) == -1);
}

TEST_CASE("reduce with everything pre-flagged is a no-op") {
    const auto x = clique_complex(4);
    VertexIndex flags(4);
    for (int i = 0; i < 4; ++i) flags.set(i, -1);
    const auto res = reduce(x, flags, 1);
    CHECK(res.removed_ids.empty());
    CHECK(res.complex.num_vertices() == 4);
    CHECK(res.trace.empty());
}

TEST_CASE("reduce requires a repaired complex") {
    SimplicialComplex2 two({{0, {0, 0}, Tag::Added}, {1, {5, 5}, Tag::Added}}, {}, {});
    CHECK_THROWS_AS(reduce(two, VertexIndex(2), 1), std::invalid_argument);
}

TEST_CASE("reduce drops a duplicated added vertex") {
    // a cluster covering its hull, with one Added vertex duplicated on top of
    // an Existing one; the duplicate can never be load-bearing
    std::vector<TaggedPoint> pts{{{0.40, 0.40}, Tag::Existing}, {{0.60, 0.40}, Tag::Existing},
                                 {{0.50, 0.56}, Tag::Existing}, {{0.40, 0.40}, Tag::Added}};
    const auto x = build_rips(pts, 0.25);
    REQUIRE(betti(x) == BettiPair{1, 0});
    const auto res = reduce(x, make_default_flags(x), 7);
    REQUIRE(res.removed_ids.size() == 1);
    CHECK(res.removed_ids[0] == 3);
    CHECK(betti(res.complex) == BettiPair{1, 0});
}

TEST_CASE("reduce trace is sound and replayable against the from-scratch oracle") {
    const Domain d{1.0};
    std::vector<TaggedPoint> all = boundary_points(d, 0.25);
    for (const auto& p : grid_positions(d, 0.25, ComplexKind::Cech)) all.push_back({p, Tag::Added});
    auto x = build_cech(all, 0.25);
    REQUIRE(betti(x) == BettiPair{1, 0});
    const auto res = reduce(x, make_default_flags(x), 5);
    // replay: apply the removals in order, checking each accepted step
    auto replay = x;
    for (const auto& step : res.trace) {
        if (!step.removed) {
            CHECK(!(betti(remove_vertex(replay, step.vertex_id)) == BettiPair{1, 0}));
            CHECK(!(step.betti_after == BettiPair{1, 0}));
            continue;
        }
        replay = remove_vertex(replay, step.vertex_id);
        CHECK(betti(replay) == oracle::betti_dense(replay));
        CHECK(betti(replay) == BettiPair{1, 0});
    }
    CHECK(replay.num_vertices() == res.complex.num_vertices());
}

TEST_CASE("boundary_points counts and spacing") {
    const Domain d{1.0};
    const auto b25 = boundary_points(d, 0.25);
    CHECK(b25.size() == 16);
    const auto b50 = boundary_points(d, 0.5);
    CHECK(b50.size() == 8);
    for (const auto& p : b25) {
        CHECK(p.tag == Tag::Boundary);
        const bool on_perimeter = p.pos.x == 0.0 || p.pos.x == 1.0 || p.pos.y == 0.0 || p.pos.y == 1.0;
        CHECK(on_perimeter);
    }
    // consecutive spacing along the perimeter never exceeds r
    for (double r : {0.25, 0.5, 0.33, 0.07}) {
        const auto ring = boundary_points(d, r);
        for (const auto& p : ring) {
            double nearest = 1e9;
            for (const auto& q : ring)
                if (&p != &q) nearest = std::min(nearest, distance(p.pos, q.pos));
            CHECK(nearest <= r + 1e-12);
        }
    }
}

TEST_CASE("run_recovery leaves a dense covering network alone") {
    // existing set = the Cech lattice: already connected and hole-free, so
    // the zero addition budget never escalates and nothing is kept
    const Domain d{1.0};
    std::vector<TaggedPoint> existing;
    for (const auto& p : grid_positions(d, 0.25, ComplexKind::Cech)) existing.push_back({p, Tag::Existing});
    for (const auto& p : grid_positions(d, 0.18, ComplexKind::Cech)) existing.push_back({p, Tag::Existing});
    RecoveryConfig cfg;
    cfg.strategy = {StrategyKind::Determinantal, ComplexKind::Cech};
    cfg.seed = 3;
    const auto res = run_recovery(existing, cfg);
    CHECK(res.final_betti == BettiPair{1, 0});
    CHECK(res.kept.empty());
    CHECK(res.removed.empty());
}

TEST_CASE("run_recovery determinism and invariants") {
    const Domain d{1.0};
    const std::vector<TaggedPoint> existing{{{0.2, 0.3}, Tag::Existing}, {{0.8, 0.7}, Tag::Existing}};
    RecoveryConfig cfg;
    cfg.strategy = {StrategyKind::Determinantal, ComplexKind::Rips};
    cfg.seed = 11;
    const auto a = run_recovery(existing, cfg);
    const auto b = run_recovery(existing, cfg);
    REQUIRE(a.kept.size() == b.kept.size());
    for (std::size_t i = 0; i < a.kept.size(); ++i) {
        CHECK(a.kept[i].pos.x == b.kept[i].pos.x);
        CHECK(a.kept[i].pos.y == b.kept[i].pos.y);
    }
    CHECK(a.final_betti == BettiPair{1, 0});
    CHECK(a.budget_trace == b.budget_trace);

    // only Added points appear in kept/removed
    for (const auto& p : a.kept) CHECK(p.tag == Tag::Added);
    for (const auto& p : a.removed) CHECK(p.tag == Tag::Added);
    // existing and boundary vertices all survive in the final complex
    int fixed_count = 0;
    for (const auto& v : a.final_complex.vertices())
        if (v.tag != Tag::Added) ++fixed_count;
    CHECK(fixed_count == 2 + 16);

    // local minimality: removing any kept added vertex breaks the homology
    for (const auto& v : a.final_complex.vertices()) {
        if (v.tag != Tag::Added) continue;
        CHECK(!(betti_without(a.final_complex, v.id) == BettiPair{1, 0}));
    }
}

TEST_CASE("run_recovery with the grid strategy takes a single pass") {
    const Domain d{1.0};
    RecoveryConfig cfg;
    cfg.strategy = {StrategyKind::Grid, ComplexKind::Rips};
    cfg.seed = 1;
    const auto res = run_recovery({}, cfg);
    CHECK(res.budget_trace.size() == 1);
    CHECK(res.added_count() == 9);
    // hollow lattice cells: the Rips grid cannot reach (1,0), reduction skipped
    CHECK(res.final_betti == BettiPair{1, 4});
    CHECK(!res.reduction_ran);
    CHECK(res.kept.size() == 9);

    cfg.strategy = {StrategyKind::Grid, ComplexKind::Cech};
    const auto cech = run_recovery({}, cfg);
    CHECK(cech.final_betti == BettiPair{1, 0});
    CHECK(cech.reduction_ran);
    CHECK(cech.kept.size() <= 9);
}

TEST_CASE("run_recovery rejects bad input") {
    RecoveryConfig cfg;
    CHECK_THROWS_AS(run_recovery({{{1.5, 0.5}, Tag::Existing}}, cfg), std::invalid_argument);
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(run_recovery({}, cfg), std::invalid_argument);
}

TEST_CASE("run_recovery respects a boundary override") {
    RecoveryConfig cfg;
    cfg.strategy = {StrategyKind::Uniform, ComplexKind::Rips};
    cfg.seed = 21;
    cfg.boundary = std::vector<Point2>{};  // empty override: no fictional ring
    const auto res = run_recovery({{{0.5, 0.5}, Tag::Existing}}, cfg);
    CHECK(res.final_betti == BettiPair{1, 0});
    int boundary_count = 0;
    for (const auto& v : res.final_complex.vertices())
        if (v.tag == Tag::Boundary) ++boundary_count;
    CHECK(boundary_count == 0);
}
