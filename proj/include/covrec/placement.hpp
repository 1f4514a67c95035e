#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "covrec/dpp.hpp"
#include "covrec/geometry.hpp"
#include "covrec/rng.hpp"

namespace covrec {

enum class StrategyKind { Grid, Uniform, Determinantal };
enum class ComplexKind { Rips, Cech };

struct AdditionStrategy {
    StrategyKind kind = StrategyKind::Determinantal;
    ComplexKind complex = ComplexKind::Rips;
};

/// Addition budget for one pass of the recovery loop: starts at the covering
/// estimate and grows by a doubling increment while the homology check fails.
struct AdditionBudget {
    int count = 0;      // N_a
    int increment = 1;  // u, doubled after each failed pass

    void escalate() {
        count += increment;
        increment *= 2;
    }
};

/// max(0, ceil(a^2 / (pi r^2)) - existing): the covering estimate for the
/// square minus the vertices already present.
inline int required_additions(double a, double r, int existing) {
    if (!(a > 0.0) || !(r > 0.0)) throw std::invalid_argument("required_additions: a, r must be > 0");
    const int need = static_cast<int>(std::ceil(a * a / (std::numbers::pi * r * r)));
    return std::max(0, need - existing);
}

/// Centered square lattice with the complex-dependent spacing: sqrt(2) r for
/// Cech (covers the square exactly), 2r for Rips. Margins split the slack
/// equally so the lattice spans the whole domain.
inline std::vector<Point2> grid_positions(const Domain& d, double r, ComplexKind kind) {
    if (!(r > 0.0)) throw std::invalid_argument("grid_positions: radius must be > 0");
    const double spacing = (kind == ComplexKind::Cech) ? std::numbers::sqrt2 * r : 2.0 * r;
    const int m = static_cast<int>(std::floor(d.side / spacing + 1e-9)) + 1;
    const double margin = (d.side - (m - 1) * spacing) / 2.0;
    std::vector<Point2> out;
    out.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            out.push_back({margin + i * spacing, margin + j * spacing});
    return out;
}

inline std::vector<Point2> uniform_positions(int n, const Domain& d, std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("uniform_positions: n must be >= 0");
    auto rng = make_engine(seed);
    std::vector<Point2> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double x = uniform01(rng) * d.side;
        const double y = uniform01(rng) * d.side;
        out.push_back({x, y});
    }
    return out;
}

/// One addition pass. Grid ignores n and existing and returns the full
/// lattice; Uniform ignores existing positions; Determinantal conditions the
/// Ginibre sampler on them.
inline std::vector<TaggedPoint> place(const AdditionStrategy& strategy, int n,
                                      const std::vector<TaggedPoint>& existing,
                                      const Domain& d, double r, std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("place: n must be >= 0");
    std::vector<Point2> positions;
    switch (strategy.kind) {
        case StrategyKind::Grid:
            positions = grid_positions(d, r, strategy.complex);
            break;
        case StrategyKind::Uniform:
            positions = uniform_positions(n, d, seed);
            break;
        case StrategyKind::Determinantal: {
            std::vector<Point2> cond;
            cond.reserve(existing.size());
            for (const auto& p : existing) cond.push_back(p.pos);
            positions = sample_conditioned(n, cond, d, seed);
            break;
        }
    }
    std::vector<TaggedPoint> out;
    out.reserve(positions.size());
    for (const auto& p : positions) out.push_back({p, Tag::Added});
    return out;
}

}  // namespace covrec
