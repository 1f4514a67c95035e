#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "covrec/geometry.hpp"

namespace covrec {

struct BettiPair {
    int beta0 = 0;
    int beta1 = 0;
    friend bool operator==(const BettiPair&, const BettiPair&) = default;
};

struct BettiDetail {
    int beta0 = 0;
    int beta1 = 0;
    int rank1 = 0;  // rank of the vertex-edge boundary matrix over GF(2)
    int rank2 = 0;  // rank of the edge-triangle boundary matrix over GF(2)
};

namespace gf2 {

/// Incremental GF(2) column-rank accumulator over a fixed number of bit rows.
/// Columns are reduced against the stored pivot basis; independent columns
/// join the basis. Exact integer arithmetic, no floating point.
class RankAccumulator {
public:
    explicit RankAccumulator(int rows)
        : words_((rows + 63) / 64), pivots_(static_cast<std::size_t>(rows)) {}

    /// Returns true and absorbs the column if it is independent of the basis.
    bool add_column(std::vector<std::uint64_t> col) {
        for (;;) {
            int pivot = lowest_bit(col);
            if (pivot < 0) return false;  // reduced to zero: dependent
            auto& slot = pivots_[static_cast<std::size_t>(pivot)];
            if (slot.empty()) {
                slot = std::move(col);
                ++rank_;
                return true;
            }
            for (int w = 0; w < words_; ++w) col[static_cast<std::size_t>(w)] ^= slot[static_cast<std::size_t>(w)];
        }
    }

    int rank() const { return rank_; }
    int words() const { return words_; }

private:
    int lowest_bit(const std::vector<std::uint64_t>& col) const {
        for (int w = 0; w < words_; ++w) {
            if (col[static_cast<std::size_t>(w)] != 0)
                return w * 64 + std::countr_zero(col[static_cast<std::size_t>(w)]);
        }
        return -1;
    }

    int words_;
    int rank_ = 0;
    std::vector<std::vector<std::uint64_t>> pivots_;  // indexed by pivot row
};

}  // namespace gf2

/// The 2-skeleton of a simplicial complex over tagged planar points.
/// Vertex ids are stable across removals (they index the original point set).
/// Simplices are stored with sorted ids in lexicographic order, and the set is
/// closed under faces: every edge of a stored triangle is stored, every vertex
/// of a stored edge is stored.
class SimplicialComplex2 {
public:
    struct Vertex {
        int id = 0;
        Point2 pos;
        Tag tag = Tag::Existing;
    };

    SimplicialComplex2() = default;

    SimplicialComplex2(std::vector<Vertex> vertices,
                       std::vector<std::array<int, 2>> edges,
                       std::vector<std::array<int, 3>> triangles)
        : vertices_(std::move(vertices)), edges_(std::move(edges)), triangles_(std::move(triangles)) {
        canonicalize();
        validate_closure();
        build_adjacency();
    }

    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }

    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_edges() const { return edges_.size(); }
    std::size_t num_triangles() const { return triangles_.size(); }
    bool empty() const { return vertices_.empty(); }

    bool has_vertex(int id) const { return slot_of(id) >= 0; }

    const Vertex& vertex(int id) const {
        int s = slot_of(id);
        if (s < 0) throw std::invalid_argument("SimplicialComplex2: unknown vertex id");
        return vertices_[static_cast<std::size_t>(s)];
    }

    /// Sorted ids of neighbors of `id`.
    const std::vector<int>& neighbors(int id) const {
        int s = slot_of(id);
        if (s < 0) throw std::invalid_argument("SimplicialComplex2: unknown vertex id");
        return adjacency_[static_cast<std::size_t>(s)];
    }

    bool has_edge(int a, int b) const {
        if (a > b) std::swap(a, b);
        std::array<int, 2> e{a, b};
        return std::binary_search(edges_.begin(), edges_.end(), e);
    }

    /// Slot (dense index) of a vertex id, or -1.
    int slot_of(int id) const {
        auto it = std::lower_bound(vertices_.begin(), vertices_.end(), id,
                                   [](const Vertex& v, int key) { return v.id < key; });
        if (it == vertices_.end() || it->id != id) return -1;
        return static_cast<int>(it - vertices_.begin());
    }

private:
    void canonicalize() {
        std::sort(vertices_.begin(), vertices_.end(),
                  [](const Vertex& a, const Vertex& b) { return a.id < b.id; });
        for (std::size_t i = 1; i < vertices_.size(); ++i)
            if (vertices_[i].id == vertices_[i - 1].id)
                throw std::invalid_argument("SimplicialComplex2: duplicate vertex id");
        for (auto& e : edges_) {
            if (e[0] > e[1]) std::swap(e[0], e[1]);
            if (e[0] == e[1]) throw std::invalid_argument("SimplicialComplex2: degenerate edge");
        }
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
        for (auto& t : triangles_) {
            std::sort(t.begin(), t.end());
            if (t[0] == t[1] || t[1] == t[2])
                throw std::invalid_argument("SimplicialComplex2: degenerate triangle");
        }
        std::sort(triangles_.begin(), triangles_.end());
        triangles_.erase(std::unique(triangles_.begin(), triangles_.end()), triangles_.end());
    }

    void validate_closure() {
        for (const auto& e : edges_) {
            if (slot_of(e[0]) < 0 || slot_of(e[1]) < 0)
                throw std::invalid_argument("SimplicialComplex2: edge references missing vertex");
        }
        for (const auto& t : triangles_) {
            if (!has_edge(t[0], t[1]) || !has_edge(t[0], t[2]) || !has_edge(t[1], t[2]))
                throw std::invalid_argument("SimplicialComplex2: triangle references missing edge");
        }
    }

    void build_adjacency() {
        adjacency_.assign(vertices_.size(), {});
        for (const auto& e : edges_) {
            adjacency_[static_cast<std::size_t>(slot_of(e[0]))].push_back(e[1]);
            adjacency_[static_cast<std::size_t>(slot_of(e[1]))].push_back(e[0]);
        }
        for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
    }

    std::vector<Vertex> vertices_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<std::vector<int>> adjacency_;
};

namespace detail {

inline bool rips_edge(const Point2& p, const Point2& q, double r) {
    const double t = 2.0 * r;
    return distance_sq(p, q) <= t * t * (1.0 + kRelTol);
}

/// Shared edge pass + flag-rule triangle enumeration. `cech` additionally
/// requires the three balls to intersect (min enclosing radius <= r).
inline SimplicialComplex2 build_complex(const std::vector<TaggedPoint>& points, double r, bool cech) {
    if (!(r > 0.0)) throw std::invalid_argument("build complex: radius must be > 0");
    const int n = static_cast<int>(points.size());
    std::vector<SimplicialComplex2::Vertex> vertices(points.size());
    for (int i = 0; i < n; ++i)
        vertices[static_cast<std::size_t>(i)] = {i, points[static_cast<std::size_t>(i)].pos, points[static_cast<std::size_t>(i)].tag};

    const int words = (n + 63) / 64;
    std::vector<std::uint64_t> adj(static_cast<std::size_t>(n) * static_cast<std::size_t>(words ? words : 1), 0);
    std::vector<std::array<int, 2>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rips_edge(points[static_cast<std::size_t>(i)].pos, points[static_cast<std::size_t>(j)].pos, r)) {
                edges.push_back({i, j});
                adj[static_cast<std::size_t>(i * words + j / 64)] |= 1ull << (j % 64);
                adj[static_cast<std::size_t>(j * words + i / 64)] |= 1ull << (i % 64);
            }
        }
    }

    std::vector<std::array<int, 3>> triangles;
    const double rtol = r * (1.0 + kRelTol);
    for (const auto& e : edges) {
        const int i = e[0], j = e[1];
        // common neighbors k > j keep triangles canonical and unique
        for (int w = j / 64; w < words; ++w) {
            std::uint64_t common = adj[static_cast<std::size_t>(i * words + w)] & adj[static_cast<std::size_t>(j * words + w)];
            if (w == j / 64) {
                const int b = j % 64;
                common = (b == 63) ? 0 : (common & ~((1ull << (b + 1)) - 1ull));
            }
            while (common) {
                const int k = w * 64 + std::countr_zero(common);
                common &= common - 1;
                if (cech &&
                    min_enclosing_radius(points[static_cast<std::size_t>(i)].pos,
                                         points[static_cast<std::size_t>(j)].pos,
                                         points[static_cast<std::size_t>(k)].pos) > rtol)
                    continue;
                triangles.push_back({i, j, k});
            }
        }
    }
    return SimplicialComplex2(std::move(vertices), std::move(edges), std::move(triangles));
}

/// Betti numbers (and boundary ranks) of the subcomplex obtained by skipping
/// one vertex id (-1 skips nothing). beta0 = V - rank d1, beta1 = Z1 - rank d2
/// with Z1 = E - rank d1. Columns of d2 are cycles, so rank d2 can never
/// exceed dim Z1; triangle processing stops as soon as it gets there.
inline BettiDetail betti_impl(const SimplicialComplex2& x, int skip_id) {
    BettiDetail out;
    const auto& verts = x.vertices();
    const auto& edges = x.edges();
    const auto& tris = x.triangles();

    int nv = 0;
    std::vector<int> vrow(verts.size(), -1);
    for (std::size_t s = 0; s < verts.size(); ++s)
        if (verts[s].id != skip_id) vrow[s] = nv++;
    if (nv == 0) return out;

    gf2::RankAccumulator r1(nv);
    int ne = 0;
    std::vector<int> erow(edges.size(), -1);
    const int vwords = (nv + 63) / 64;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e][0] == skip_id || edges[e][1] == skip_id) continue;
        erow[e] = ne++;
        std::vector<std::uint64_t> col(static_cast<std::size_t>(vwords), 0);
        const int ra = vrow[static_cast<std::size_t>(x.slot_of(edges[e][0]))];
        const int rb = vrow[static_cast<std::size_t>(x.slot_of(edges[e][1]))];
        col[static_cast<std::size_t>(ra / 64)] |= 1ull << (ra % 64);
        col[static_cast<std::size_t>(rb / 64)] |= 1ull << (rb % 64);
        r1.add_column(std::move(col));
    }
    out.rank1 = r1.rank();
    out.beta0 = nv - out.rank1;

    const int cycle_dim = ne - out.rank1;
    if (cycle_dim > 0 && !tris.empty()) {
        gf2::RankAccumulator r2(ne);
        const int ewords = (ne + 63) / 64;
        // edge row lookup by binary search in the sorted edge list
        auto edge_row = [&](int a, int b) {
            std::array<int, 2> key{a, b};
            auto it = std::lower_bound(edges.begin(), edges.end(), key);
            return erow[static_cast<std::size_t>(it - edges.begin())];
        };
        for (const auto& t : tris) {
            if (t[0] == skip_id || t[1] == skip_id || t[2] == skip_id) continue;
            std::vector<std::uint64_t> col(static_cast<std::size_t>(ewords), 0);
            for (const auto& [a, b] : {std::pair{t[0], t[1]}, std::pair{t[0], t[2]}, std::pair{t[1], t[2]}}) {
                const int row = edge_row(a, b);
                col[static_cast<std::size_t>(row / 64)] |= 1ull << (row % 64);
            }
            r2.add_column(std::move(col));
            if (r2.rank() == cycle_dim) break;  // beta1 = 0, rest are dependent
        }
        out.rank2 = r2.rank();
    }
    out.beta1 = cycle_dim - out.rank2;
    return out;
}

}  // namespace detail

/// Vietoris-Rips 2-skeleton: edge iff distance <= 2r, triangle iff all three
/// edges are present (flag rule).
inline SimplicialComplex2 build_rips(const std::vector<TaggedPoint>& points, double r) {
    return detail::build_complex(points, r, false);
}

/// Cech 2-skeleton: edges as in Rips, triangle iff the three radius-r balls
/// have a common point (min enclosing radius <= r).
inline SimplicialComplex2 build_cech(const std::vector<TaggedPoint>& points, double r) {
    return detail::build_complex(points, r, true);
}

inline BettiDetail betti_detail(const SimplicialComplex2& x) { return detail::betti_impl(x, -1); }

inline BettiPair betti(const SimplicialComplex2& x) {
    const BettiDetail d = detail::betti_impl(x, -1);
    return {d.beta0, d.beta1};
}

/// Betti numbers of x with one vertex (and its star) skipped, without
/// materializing the smaller complex. Agrees with betti(remove_vertex(x, id)).
inline BettiPair betti_without(const SimplicialComplex2& x, int id) {
    const BettiDetail d = detail::betti_impl(x, id);
    return {d.beta0, d.beta1};
}

/// Value-semantics removal: returns a new complex without `id`, its incident
/// edges and incident triangles. The input is left untouched.
inline SimplicialComplex2 remove_vertex(const SimplicialComplex2& x, int id) {
    if (!x.has_vertex(id)) throw std::invalid_argument("remove_vertex: unknown vertex id");
    std::vector<SimplicialComplex2::Vertex> verts;
    verts.reserve(x.num_vertices() - 1);
    for (const auto& v : x.vertices())
        if (v.id != id) verts.push_back(v);
    std::vector<std::array<int, 2>> edges;
    edges.reserve(x.num_edges());
    for (const auto& e : x.edges())
        if (e[0] != id && e[1] != id) edges.push_back(e);
    std::vector<std::array<int, 3>> tris;
    tris.reserve(x.num_triangles());
    for (const auto& t : x.triangles())
        if (t[0] != id && t[1] != id && t[2] != id) tris.push_back(t);
    return SimplicialComplex2(std::move(verts), std::move(edges), std::move(tris));
}

}  // namespace covrec
