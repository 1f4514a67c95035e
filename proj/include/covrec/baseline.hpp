#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

#include "covrec/geometry.hpp"
#include "covrec/placement.hpp"

namespace covrec {

struct GreedyConfig {
    Domain domain{1.0};
    double radius = 0.25;
    double stop_radius = 0.25;  // furthest candidate inside this ball of a vertex -> stop
    ComplexKind lattice = ComplexKind::Cech;
};

/// Greedy set-cover baseline: candidates on the sqrt(2) r lattice, repeatedly
/// add the candidate furthest from every vertex placed so far (existing plus
/// added, ties to the lowest candidate id), stop once the furthest candidate
/// sits within the stop radius of some vertex.
inline std::vector<Point2> greedy_cover(const std::vector<Point2>& existing, const GreedyConfig& cfg) {
    if (!(cfg.radius > 0.0) || !(cfg.stop_radius > 0.0))
        throw std::invalid_argument("greedy_cover: radii must be > 0");
    const std::vector<Point2> candidates = grid_positions(cfg.domain, cfg.radius, cfg.lattice);
    const double stop = cfg.stop_radius * (1.0 + kRelTol);

    std::vector<double> nearest(candidates.size(), std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < candidates.size(); ++c)
        for (const auto& p : existing)
            nearest[c] = std::min(nearest[c], distance(candidates[c], p));

    std::vector<bool> used(candidates.size(), false);
    std::vector<Point2> added;
    for (;;) {
        std::size_t best = candidates.size();
        double best_dist = -1.0;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (used[c]) continue;
            if (nearest[c] > best_dist) {
                best_dist = nearest[c];
                best = c;
            }
        }
        if (best == candidates.size() || best_dist <= stop) break;
        used[best] = true;
        added.push_back(candidates[best]);
        for (std::size_t c = 0; c < candidates.size(); ++c)
            nearest[c] = std::min(nearest[c], distance(candidates[c], candidates[best]));
    }
    return added;
}

}  // namespace covrec
