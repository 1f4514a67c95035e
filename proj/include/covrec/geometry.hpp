#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace covrec {

// Relative slack for threshold comparisons (edge rule, triangle rule, greedy
// stop rule). Lattice constructions place points exactly on the decision
// boundary, so strict comparisons would flip on rounding noise.
inline constexpr double kRelTol = 1e-9;

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

/// The area to repair: the square [0, side]^2 with origin at (0,0).
struct Domain {
    double side = 1.0;

    Domain() = default;
    explicit Domain(double a) : side(a) {
        if (!(a > 0.0)) throw std::invalid_argument("Domain: side must be > 0");
    }

    bool contains(const Point2& p) const {
        return p.x >= 0.0 && p.x <= side && p.y >= 0.0 && p.y <= side;
    }
    Point2 center() const { return {side / 2.0, side / 2.0}; }
};

enum class Tag { Existing, Added, Boundary };

struct TaggedPoint {
    Point2 pos;
    Tag tag = Tag::Existing;
};

inline double distance_sq(const Point2& p, const Point2& q) {
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    return dx * dx + dy * dy;
}

inline double distance(const Point2& p, const Point2& q) {
    return std::sqrt(distance_sq(p, q));
}

/// Radius of the smallest circle containing all three points. Equals half the
/// longest side for right/obtuse/degenerate triangles, else the circumradius.
/// Three balls of radius r share a common point iff this is <= r.
inline double min_enclosing_radius(const Point2& p, const Point2& q, const Point2& s) {
    const double ab = distance_sq(p, q);
    const double ac = distance_sq(p, s);
    const double bc = distance_sq(q, s);
    double longest = ab, other1 = ac, other2 = bc;
    if (ac > longest) { longest = ac; other1 = ab; other2 = bc; }
    if (bc > longest) { longest = bc; other1 = ab; other2 = ac; }
    if (longest >= other1 + other2)  // right, obtuse or collinear
        return std::sqrt(longest) / 2.0;
    // acute: circumradius = abc / (4 * area)
    const double cross = (q.x - p.x) * (s.y - p.y) - (q.y - p.y) * (s.x - p.x);
    const double area2 = std::abs(cross);  // twice the triangle area, > 0 here
    return std::sqrt(ab * ac * bc) / (2.0 * area2);
}

/// Fraction of a resolution x resolution cell-centered sample lattice of the
/// domain square lying within distance r of some point. Deterministic.
inline double coverage_fraction(const std::vector<Point2>& points, double r,
                                const Domain& d, int resolution = 200) {
    if (resolution < 2) throw std::invalid_argument("coverage_fraction: resolution must be >= 2");
    if (points.empty()) return 0.0;
    const double r2 = r * r;
    const double cell = d.side / resolution;
    long covered = 0;
    for (int i = 0; i < resolution; ++i) {
        const double x = (i + 0.5) * cell;
        for (int j = 0; j < resolution; ++j) {
            const Point2 g{x, (j + 0.5) * cell};
            for (const Point2& p : points) {
                if (distance_sq(g, p) <= r2) { ++covered; break; }
            }
        }
    }
    return static_cast<double>(covered) / (static_cast<double>(resolution) * resolution);
}

}  // namespace covrec
