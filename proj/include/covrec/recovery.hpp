#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "covrec/complex.hpp"
#include "covrec/geometry.hpp"
#include "covrec/placement.hpp"
#include "covrec/rng.hpp"

namespace covrec {

struct loop_cap_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

using Bits = std::vector<std::uint64_t>;

inline int bits_popcount(const Bits& b) {
    int c = 0;
    for (auto w : b) c += std::popcount(w);
    return c;
}

inline bool bits_test(const Bits& b, int v) {
    return (b[static_cast<std::size_t>(v / 64)] >> (v % 64)) & 1u;
}

inline void bits_clear(Bits& b, int v) { b[static_cast<std::size_t>(v / 64)] &= ~(1ull << (v % 64)); }

/// Exact maximum clique via branch and bound with a greedy-coloring bound
/// (the classic MCQ scheme). Instances are common-neighborhoods of a
/// triangle; a greedy clique seeds the incumbent so dense neighborhoods
/// prune immediately.
class MaxCliqueSolver {
public:
    MaxCliqueSolver(const std::vector<Bits>& adj, int n)
        : adj_(adj), n_(n), words_((n + 63) / 64) {}

    int solve(int seed_clique = 0) {
        best_ = seed_clique;
        if (n_ == 0) return best_;
        Bits all(static_cast<std::size_t>(words_), 0);
        for (int v = 0; v < n_; ++v) all[static_cast<std::size_t>(v / 64)] |= 1ull << (v % 64);
        expand(all, 0);
        return best_;
    }

    /// Greedy clique: repeatedly take the candidate with most candidate-neighbors.
    int greedy(const Bits& start) const {
        Bits cand = start;
        int size = 0;
        while (bits_popcount(cand) > 0) {
            int pick = -1, pick_deg = -1;
            for (int v = 0; v < n_; ++v) {
                if (!bits_test(cand, v)) continue;
                int deg = 0;
                for (int w = 0; w < words_; ++w)
                    deg += std::popcount(cand[static_cast<std::size_t>(w)] & adj_[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)]);
                if (deg > pick_deg) { pick = v; pick_deg = deg; }
            }
            ++size;
            Bits next(static_cast<std::size_t>(words_));
            for (int w = 0; w < words_; ++w)
                next[static_cast<std::size_t>(w)] = cand[static_cast<std::size_t>(w)] & adj_[static_cast<std::size_t>(pick)][static_cast<std::size_t>(w)];
            cand = std::move(next);
        }
        return size;
    }

private:
    void expand(const Bits& cand, int size) {
        // greedy coloring: vertices grouped by color class, colors nondecreasing
        std::vector<std::pair<int, int>> order;  // (vertex, color)
        {
            Bits left = cand;
            int color = 0;
            while (bits_popcount(left) > 0) {
                ++color;
                Bits cls = left;
                for (int v = 0; v < n_; ++v) {
                    if (!bits_test(cls, v)) continue;
                    order.emplace_back(v, color);
                    bits_clear(left, v);
                    for (int w = 0; w < words_; ++w)
                        cls[static_cast<std::size_t>(w)] &= ~adj_[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)];
                }
            }
        }
        Bits pool = cand;
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const auto [v, color] = *it;
            if (size + color <= best_) return;
            Bits next(static_cast<std::size_t>(words_));
            bool nonempty = false;
            for (int w = 0; w < words_; ++w) {
                next[static_cast<std::size_t>(w)] = pool[static_cast<std::size_t>(w)] & adj_[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)];
                nonempty |= next[static_cast<std::size_t>(w)] != 0;
            }
            if (nonempty)
                expand(next, size + 1);
            else
                best_ = std::max(best_, size + 1);
            bits_clear(pool, v);
        }
    }

    const std::vector<Bits>& adj_;
    int n_;
    int words_;
    int best_ = 0;
};

inline std::vector<int> common_neighbors(const SimplicialComplex2& x, int a, int b, int c) {
    const auto& na = x.neighbors(a);
    const auto& nb = x.neighbors(b);
    const auto& nc = x.neighbors(c);
    std::vector<int> ab, out;
    std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(ab));
    std::set_intersection(ab.begin(), ab.end(), nc.begin(), nc.end(), std::back_inserter(out));
    out.erase(std::remove_if(out.begin(), out.end(), [&](int v) { return v == a || v == b || v == c; }),
              out.end());
    return out;
}

struct NeighborhoodClique {
    std::vector<Bits> adj;
    int n = 0;

    explicit NeighborhoodClique(const SimplicialComplex2& x, const std::vector<int>& members)
        : n(static_cast<int>(members.size())) {
        const int words = (n + 63) / 64;
        adj.assign(static_cast<std::size_t>(n), Bits(static_cast<std::size_t>(words ? words : 1), 0));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (x.has_edge(members[static_cast<std::size_t>(i)], members[static_cast<std::size_t>(j)])) {
                    adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j / 64)] |= 1ull << (j % 64);
                    adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(i / 64)] |= 1ull << (i % 64);
                }
    }

    int greedy_lower_bound() const {
        if (n == 0) return 0;
        MaxCliqueSolver solver(adj, n);
        Bits all(adj[0].size(), 0);
        for (int v = 0; v < n; ++v) all[static_cast<std::size_t>(v / 64)] |= 1ull << (v % 64);
        return solver.greedy(all);
    }

    int exact(int seed_clique) const {
        MaxCliqueSolver solver(adj, n);
        return solver.solve(seed_clique);
    }
};

}  // namespace detail

/// Degree of a 2-simplex: the dimension of the largest simplex it is a face
/// of, under the flag rule (higher simplices are cliques). Equals 2 plus the
/// maximum clique among the mutual neighbors of the triangle's vertices.
inline int triangle_degree(const SimplicialComplex2& x, const std::array<int, 3>& t) {
    const auto& tris = x.triangles();
    std::array<int, 3> key = t;
    std::sort(key.begin(), key.end());
    if (!std::binary_search(tris.begin(), tris.end(), key))
        throw std::invalid_argument("triangle_degree: triangle not in complex");
    const std::vector<int> common = detail::common_neighbors(x, key[0], key[1], key[2]);
    if (common.empty()) return 2;
    detail::NeighborhoodClique nbh(x, common);
    return 2 + nbh.exact(nbh.greedy_lower_bound());
}

/// Per-vertex removal priority; negative flags a vertex as unremovable.
struct VertexIndex {
    std::vector<int> value;  // indexed by vertex id

    explicit VertexIndex(std::size_t max_id = 0) : value(max_id, 0) {}
    int at(int id) const { return value[static_cast<std::size_t>(id)]; }
    void set(int id, int v) { value[static_cast<std::size_t>(id)] = v; }
    bool unremovable(int id) const { return at(id) < 0; }
};

/// Flags with Existing and Boundary vertices marked unremovable.
inline VertexIndex make_default_flags(const SimplicialComplex2& x) {
    int max_id = -1;
    for (const auto& v : x.vertices()) max_id = std::max(max_id, v.id);
    VertexIndex flags(static_cast<std::size_t>(max_id + 1));
    for (const auto& v : x.vertices())
        if (v.tag != Tag::Added) flags.set(v.id, -1);
    return flags;
}

/// Index of a vertex: the minimum degree over its incident triangles, 0 when
/// it lies in no triangle, or its negative flag when marked unremovable.
inline int vertex_index(const SimplicialComplex2& x, int id, const VertexIndex& flags) {
    if (!x.has_vertex(id)) throw std::invalid_argument("vertex_index: unknown vertex id");
    if (flags.unremovable(id)) return flags.at(id);
    int best = -1;
    for (const auto& t : x.triangles()) {
        if (t[0] != id && t[1] != id && t[2] != id) continue;
        const int deg = triangle_degree(x, t);
        best = (best < 0) ? deg : std::min(best, deg);
    }
    return best < 0 ? 0 : best;
}

struct ReductionStep {
    int vertex_id = 0;
    int index = 0;
    bool removed = false;
    BettiPair betti_after;
};

struct ReduceResult {
    SimplicialComplex2 complex;
    std::vector<int> removed_ids;
    std::vector<ReductionStep> trace;
};

namespace detail {

/// Reduction working state: incident-triangle lists per vertex, vertex
/// indices with lazy exact-clique evaluation. The min over incident triangle
/// degrees is computed smallest-neighborhood first; a triangle whose greedy
/// clique already proves degree >= the running min cannot lower it and is
/// skipped without the exact solve.
class ReduceEngine {
public:
    explicit ReduceEngine(SimplicialComplex2 x) : x_(std::move(x)) { rebuild_incidence(); }

    const SimplicialComplex2& complex() const { return x_; }
    SimplicialComplex2&& take_complex() { return std::move(x_); }

    int compute_index(int id) const {
        auto it = incident_.find(id);
        if (it == incident_.end() || it->second.empty()) return 0;
        std::vector<std::pair<std::size_t, const std::array<int, 3>*>> order;
        order.reserve(it->second.size());
        for (const auto& t : it->second) {
            const auto common = common_neighbors(x_, t[0], t[1], t[2]);
            order.emplace_back(common.size(), &t);
        }
        std::sort(order.begin(), order.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        int best = -1;
        for (const auto& [m, tp] : order) {
            const auto common = common_neighbors(x_, (*tp)[0], (*tp)[1], (*tp)[2]);
            NeighborhoodClique nbh(x_, common);
            const int lb = 2 + nbh.greedy_lower_bound();
            if (best >= 0 && lb >= best) continue;  // cannot lower the min
            const int deg = 2 + nbh.exact(lb - 2);
            best = (best < 0) ? deg : std::min(best, deg);
        }
        return best < 0 ? 0 : best;
    }

    /// Remove `id`, returning the vertices (old neighborhood, distance <= 2)
    /// whose indices may have changed.
    std::vector<int> remove(int id) {
        std::vector<int> affected;
        for (int u : x_.neighbors(id)) {
            affected.push_back(u);
            for (int w : x_.neighbors(u)) affected.push_back(w);
        }
        std::sort(affected.begin(), affected.end());
        affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
        affected.erase(std::remove(affected.begin(), affected.end(), id), affected.end());
        x_ = remove_vertex(x_, id);
        rebuild_incidence();
        return affected;
    }

private:
    void rebuild_incidence() {
        incident_.clear();
        for (const auto& t : x_.triangles())
            for (int v : t) incident_[v].push_back(t);
    }

    SimplicialComplex2 x_;
    std::map<int, std::vector<std::array<int, 3>>> incident_;
};

/// One sticky-flag pass: repeatedly pick the highest-index unflagged vertex
/// (ties broken by the seeded RNG), drop it if the Betti pair stays (1,0),
/// otherwise flag it unremovable.
inline bool reduce_pass(ReduceEngine& engine, VertexIndex& flags, std::mt19937_64& rng,
                        std::vector<int>& removed, std::vector<ReductionStep>& trace) {
    std::map<int, int> index;  // ordered: deterministic tie collection
    for (const auto& v : engine.complex().vertices())
        if (!flags.unremovable(v.id)) index[v.id] = engine.compute_index(v.id);

    bool any_removed = false;
    while (!index.empty()) {
        int best = -1;
        for (const auto& [id, idx] : index) best = std::max(best, idx);
        std::vector<int> ties;
        for (const auto& [id, idx] : index)
            if (idx == best) ties.push_back(id);
        const int pick = ties[uniform_index(rng, ties.size())];

        const BettiPair after = betti_without(engine.complex(), pick);
        if (after == BettiPair{1, 0}) {
            const auto affected = engine.remove(pick);
            index.erase(pick);
            removed.push_back(pick);
            any_removed = true;
            for (int u : affected)
                if (auto it = index.find(u); it != index.end()) it->second = engine.compute_index(u);
            trace.push_back({pick, best, true, {1, 0}});
        } else {
            flags.set(pick, -1);
            index.erase(pick);
            trace.push_back({pick, best, false, after});
        }
    }
    return any_removed;
}

}  // namespace detail

/// Homology-preserving reduction: removes vertices one at a time, highest
/// index first, keeping only removals that leave (beta0, beta1) = (1, 0).
/// Vertices flagged during a pass are re-examined after any later removal
/// succeeds, so on exit no single remaining removable vertex can be dropped
/// without changing the homology.
inline ReduceResult reduce(const SimplicialComplex2& x, VertexIndex flags, std::uint64_t seed) {
    if (!(betti(x) == BettiPair{1, 0}))
        throw std::invalid_argument("reduce: complex must have (beta0, beta1) = (1, 0)");
    const VertexIndex original = flags;
    ReduceResult result;
    result.complex = x;
    auto rng = make_engine(seed);
    for (;;) {
        detail::ReduceEngine engine(std::move(result.complex));
        const bool removed_any = detail::reduce_pass(engine, flags, rng, result.removed_ids, result.trace);
        result.complex = engine.take_complex();
        if (!removed_any) break;
        // re-enable surviving vertices that were removable on entry; a removal
        // elsewhere may have made them redundant again
        bool candidates_left = false;
        for (const auto& v : result.complex.vertices()) {
            if (original.at(v.id) >= 0) {
                flags.set(v.id, 0);
                candidates_left = true;
            }
        }
        if (!candidates_left) break;
    }
    return result;
}

/// Fictional boundary vertices along the perimeter of the domain square,
/// spacing <= r with corners included. They participate in the complex so
/// holes against the border are detected, and are never removable.
inline std::vector<TaggedPoint> boundary_points(const Domain& d, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("boundary_points: radius must be > 0");
    const int k = std::max(1, static_cast<int>(std::ceil(d.side / r - 1e-12)));
    const double h = d.side / k;
    std::vector<TaggedPoint> out;
    out.reserve(static_cast<std::size_t>(4 * k));
    for (int i = 0; i < k; ++i) {
        const double t = i * h;
        out.push_back({{t, 0.0}, Tag::Boundary});
        out.push_back({{d.side, t}, Tag::Boundary});
        out.push_back({{d.side - t, d.side}, Tag::Boundary});
        out.push_back({{0.0, d.side - t}, Tag::Boundary});
    }
    return out;
}

struct RecoveryConfig {
    double radius = 0.25;
    Domain domain{1.0};
    AdditionStrategy strategy;
    std::uint64_t seed = 0;
    int max_iterations = 30;
    std::optional<std::vector<Point2>> boundary;  // override for the fictional boundary
};

struct RecoveryResult {
    std::vector<TaggedPoint> kept;     // L_a: added vertices that survived reduction
    std::vector<TaggedPoint> removed;  // added vertices dropped by reduction
    BettiPair final_betti;
    std::vector<int> budget_trace;       // vertices added per addition pass
    std::vector<BettiPair> betti_trace;  // Betti pair per addition pass
    std::vector<ReductionStep> reduction_trace;
    SimplicialComplex2 final_complex;
    std::uint64_t seed = 0;
    bool reduction_ran = false;

    int added_count() const { return static_cast<int>(kept.size() + removed.size()); }
};

inline SimplicialComplex2 build_for(ComplexKind kind, const std::vector<TaggedPoint>& pts, double r) {
    return kind == ComplexKind::Cech ? build_cech(pts, r) : build_rips(pts, r);
}

/// The disaster recovery algorithm: build the complex on existing + boundary,
/// add a covering budget of vertices, and while (beta0, beta1) != (1, 0) grow
/// the budget by a doubling increment and add a fresh batch of that size on
/// top of the previous ones. Every batch stays in the complex; the
/// determinantal sampler conditions each batch on existing and all previously
/// added vertices. Once the pair reaches (1, 0) the reduction prunes the
/// accumulated surplus. The grid strategy is deterministic with a fixed
/// count, so it takes a single addition pass; if that pass does not reach
/// (1, 0) the reduction is skipped and every added vertex is kept.
inline RecoveryResult run_recovery(const std::vector<TaggedPoint>& existing, const RecoveryConfig& cfg) {
    for (const auto& p : existing)
        if (!cfg.domain.contains(p.pos))
            throw std::invalid_argument("run_recovery: existing point outside domain");
    if (cfg.max_iterations < 1) throw std::invalid_argument("run_recovery: iteration cap must be >= 1");

    std::vector<TaggedPoint> fixed = existing;
    if (cfg.boundary) {
        for (const auto& p : *cfg.boundary) fixed.push_back({p, Tag::Boundary});
    } else {
        const auto bd = boundary_points(cfg.domain, cfg.radius);
        fixed.insert(fixed.end(), bd.begin(), bd.end());
    }

    RecoveryResult result;
    result.seed = cfg.seed;

    AdditionBudget budget{required_additions(cfg.domain.side, cfg.radius, static_cast<int>(existing.size())), 1};
    std::vector<TaggedPoint> added;
    auto run_pass = [&](int iteration) {
        std::vector<TaggedPoint> conditioning = existing;
        conditioning.insert(conditioning.end(), added.begin(), added.end());
        auto batch = place(cfg.strategy, budget.count, conditioning, cfg.domain, cfg.radius,
                           mix_seed(cfg.seed, 1, static_cast<std::uint64_t>(iteration)));
        if (cfg.strategy.kind == StrategyKind::Grid)
            added = std::move(batch);  // the lattice is the whole addition
        else
            added.insert(added.end(), batch.begin(), batch.end());
        std::vector<TaggedPoint> all = fixed;
        all.insert(all.end(), added.begin(), added.end());
        auto complex = build_for(cfg.strategy.complex, all, cfg.radius);
        const BettiPair b = betti(complex);
        result.budget_trace.push_back(budget.count);
        result.betti_trace.push_back(b);
        return std::pair{std::move(complex), b};
    };

    auto [complex, b] = run_pass(0);
    if (cfg.strategy.kind != StrategyKind::Grid) {
        int iteration = 0;
        while (!(b == BettiPair{1, 0})) {
            if (++iteration > cfg.max_iterations)
                throw loop_cap_error("run_recovery: addition loop exceeded iteration cap");
            budget.escalate();
            std::tie(complex, b) = run_pass(iteration);
        }
    }

    if (b == BettiPair{1, 0}) {
        auto reduced = reduce(complex, make_default_flags(complex), mix_seed(cfg.seed, 2));
        std::vector<bool> removed_mask(fixed.size() + added.size(), false);
        for (int id : reduced.removed_ids) removed_mask[static_cast<std::size_t>(id)] = true;
        for (std::size_t i = 0; i < added.size(); ++i) {
            const std::size_t id = fixed.size() + i;
            (removed_mask[id] ? result.removed : result.kept).push_back(added[i]);
        }
        result.final_betti = betti(reduced.complex);
        result.reduction_trace = std::move(reduced.trace);
        result.final_complex = std::move(reduced.complex);
        result.reduction_ran = true;
    } else {
        result.kept = added;
        result.final_betti = b;
        result.final_complex = std::move(complex);
    }
    return result;
}

}  // namespace covrec
