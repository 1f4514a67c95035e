#include <catch2/catch_amalgamated.hpp>

#include "covrec/complex.hpp"
#include "covrec/rng.hpp"
#include "oracles.hpp"

using namespace covrec;

namespace {

std::vector<TaggedPoint> pts(std::initializer_list<Point2> ps) {
    std::vector<TaggedPoint> out;
    for (const auto& p : ps) out.push_back({p, Tag::Added});
    return out;
}

/// Random abstract 2-complex: random graph on <= max_v vertices, each
/// 3-clique filled as a triangle with probability fill.
SimplicialComplex2 random_complex(std::mt19937_64& rng, int max_v, double edge_p, double fill) {
    const int n = 1 + static_cast<int>(uniform01(rng) * max_v);
    std::vector<SimplicialComplex2::Vertex> vs;
    for (int i = 0; i < n; ++i) vs.push_back({i, {uniform01(rng), uniform01(rng)}, Tag::Added});
    std::vector<std::vector<bool>> adj(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
    std::vector<std::array<int, 2>> es;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (uniform01(rng) < edge_p) {
                es.push_back({i, j});
                adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
            }
    std::vector<std::array<int, 3>> ts;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                if (adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] &&
                    adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] &&
                    adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] && uniform01(rng) < fill)
                    ts.push_back({i, j, k});
    return SimplicialComplex2(std::move(vs), std::move(es), std::move(ts));
}

}  // namespace

TEST_CASE("build_rips edge threshold") {
    CHECK(build_rips(pts({{0, 0}, {0.49, 0}}), 0.25).num_edges() == 1);
    CHECK(build_rips(pts({{0, 0}, {0.51, 0}}), 0.25).num_edges() == 0);
}

TEST_CASE("build_rips square of side 0.45") {
    // diagonal ~0.636 > 0.5: four sides only, no triangle
    const auto x = build_rips(pts({{0, 0}, {0.45, 0}, {0.45, 0.45}, {0, 0.45}}), 0.25);
    CHECK(x.num_edges() == 4);
    CHECK(x.num_triangles() == 0);
    CHECK(betti(x) == BettiPair{1, 1});
}

TEST_CASE("cech vs rips on the equilateral fixtures") {
    const double h = 0.45 * std::sqrt(3.0) / 2;
    const auto tri45 = pts({{0, 0}, {0.45, 0}, {0.225, h}});
    const auto cech45 = build_cech(tri45, 0.25);
    const auto rips45 = build_rips(tri45, 0.25);
    // circumradius 0.45/sqrt(3) = 0.2598 > 0.25: Cech rejects the triangle
    CHECK(cech45.num_edges() == 3);
    CHECK(cech45.num_triangles() == 0);
    CHECK(rips45.num_triangles() == 1);
    CHECK(betti(cech45) == BettiPair{1, 1});
    CHECK(betti(rips45) == BettiPair{1, 0});

    const double h40 = 0.40 * std::sqrt(3.0) / 2;
    const auto cech40 = build_cech(pts({{0, 0}, {0.40, 0}, {0.20, h40}}), 0.25);
    // circumradius 0.2309 <= 0.25
    CHECK(cech40.num_triangles() == 1);
}

TEST_CASE("single point complex") {
    const auto x = build_cech(pts({{0.3, 0.3}}), 0.25);
    CHECK(x.num_vertices() == 1);
    CHECK(x.num_edges() == 0);
    CHECK(betti(x) == BettiPair{1, 0});
}

TEST_CASE("betti hand cases") {
    CHECK(betti(SimplicialComplex2({{0, {0, 0}, Tag::Added}}, {}, {})) == BettiPair{1, 0});
    CHECK(betti(SimplicialComplex2({{0, {0, 0}, Tag::Added}, {1, {1, 0}, Tag::Added}}, {}, {})) ==
          BettiPair{2, 0});
    CHECK(betti(SimplicialComplex2()) == BettiPair{0, 0});

    // hollow 4-cycle: rank d1 = 3, so beta1 = 4 - 3 - 0 = 1
    const SimplicialComplex2 cycle(
        {{0, {0, 0}, Tag::Added}, {1, {1, 0}, Tag::Added}, {2, {1, 1}, Tag::Added}, {3, {0, 1}, Tag::Added}},
        {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, {});
    CHECK(betti(cycle) == BettiPair{1, 1});

    const SimplicialComplex2 filled(
        {{0, {0, 0}, Tag::Added}, {1, {1, 0}, Tag::Added}, {2, {0.5, 0.8}, Tag::Added}},
        {{0, 1}, {0, 2}, {1, 2}}, {{0, 1, 2}});
    CHECK(betti(filled) == BettiPair{1, 0});
}

TEST_CASE("remove_vertex hand cases") {
    const SimplicialComplex2 filled(
        {{0, {0, 0}, Tag::Added}, {1, {1, 0}, Tag::Added}, {2, {0.5, 0.8}, Tag::Added}},
        {{0, 1}, {0, 2}, {1, 2}}, {{0, 1, 2}});
    const auto no_apex = remove_vertex(filled, 2);
    CHECK(no_apex.num_vertices() == 2);
    CHECK(no_apex.num_edges() == 1);
    CHECK(no_apex.num_triangles() == 0);
    CHECK(filled.num_vertices() == 3);  // input untouched

    // isolated vertex + filled triangle: removing the isolated one reconnects
    SimplicialComplex2 mixed(
        {{0, {0, 0}, Tag::Added}, {1, {1, 0}, Tag::Added}, {2, {0.5, 0.8}, Tag::Added}, {9, {5, 5}, Tag::Added}},
        {{0, 1}, {0, 2}, {1, 2}}, {{0, 1, 2}});
    CHECK(betti(mixed) == BettiPair{2, 0});
    CHECK(betti(remove_vertex(mixed, 9)) == BettiPair{1, 0});

    const SimplicialComplex2 cycle(
        {{0, {0, 0}, Tag::Added}, {1, {1, 0}, Tag::Added}, {2, {1, 1}, Tag::Added}, {3, {0, 1}, Tag::Added}},
        {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, {});
    const auto path = remove_vertex(cycle, 3);
    CHECK(betti(path) == BettiPair{1, 0});

    CHECK_THROWS_AS(remove_vertex(cycle, 42), std::invalid_argument);
}

TEST_CASE("closure validation") {
    CHECK_THROWS_AS(SimplicialComplex2({{0, {0, 0}, Tag::Added}}, {{0, 1}}, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        SimplicialComplex2({{0, {0, 0}, Tag::Added}, {1, {1, 0}, Tag::Added}, {2, {0, 1}, Tag::Added}},
                           {{0, 1}, {0, 2}}, {{0, 1, 2}}),
        std::invalid_argument);
}

TEST_CASE("betti agrees with dense oracle and traversal on random complexes") {
    auto rng = make_engine(1234);
    for (int i = 0; i < 300; ++i) {
        const auto x = random_complex(rng, 10, 0.35, 0.6);
        const auto fast = betti(x);
        const auto dense = oracle::betti_dense(x);
        REQUIRE(fast == dense);
        REQUIRE(fast.beta0 == oracle::component_count(x));
        // Euler consistency: V - E + T = beta0 - beta1 + dim ker d2
        const auto detail = betti_detail(x);
        const int euler = static_cast<int>(x.num_vertices()) - static_cast<int>(x.num_edges()) +
                          static_cast<int>(x.num_triangles());
        const int beta2 = static_cast<int>(x.num_triangles()) - detail.rank2;
        REQUIRE(euler == detail.beta0 - detail.beta1 + beta2);
    }
}

TEST_CASE("betti_without equals betti of remove_vertex") {
    auto rng = make_engine(77);
    for (int i = 0; i < 120; ++i) {
        const auto x = random_complex(rng, 9, 0.4, 0.5);
        if (x.num_vertices() == 1) continue;
        for (const auto& v : x.vertices()) {
            REQUIRE(betti_without(x, v.id) == betti(remove_vertex(x, v.id)));
        }
    }
}

TEST_CASE("cech skeleton is a subcomplex of rips on random point sets") {
    auto rng = make_engine(99);
    for (int i = 0; i < 80; ++i) {
        std::vector<TaggedPoint> p;
        const int n = 3 + static_cast<int>(uniform01(rng) * 12);
        for (int j = 0; j < n; ++j) p.push_back({{uniform01(rng), uniform01(rng)}, Tag::Added});
        const auto cech = build_cech(p, 0.25);
        const auto rips = build_rips(p, 0.25);
        CHECK(cech.edges() == rips.edges());
        for (const auto& t : cech.triangles()) {
            CHECK(std::binary_search(rips.triangles().begin(), rips.triangles().end(), t));
        }
    }
}

TEST_CASE("build_rips matches the naive triple-loop construction") {
    auto rng = make_engine(55);
    for (int i = 0; i < 50; ++i) {
        std::vector<TaggedPoint> p;
        const int n = 2 + static_cast<int>(uniform01(rng) * 14);
        for (int j = 0; j < n; ++j) p.push_back({{uniform01(rng), uniform01(rng)}, Tag::Added});
        const auto fast = build_rips(p, 0.3);
        const auto naive = oracle::rips_naive(p, 0.3);
        REQUIRE(fast.edges() == naive.edges());
        REQUIRE(fast.triangles() == naive.triangles());
    }
}
