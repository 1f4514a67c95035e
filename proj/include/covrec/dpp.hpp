#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "covrec/geometry.hpp"
#include "covrec/rng.hpp"

namespace covrec {

struct over_constrained_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Truncated Ginibre kernel: the rank-N projection onto span(phi_0..phi_{N-1})
/// with phi_k(z) = (pi k!)^{-1/2} e^{-|z|^2/2} z^k. A projection kernel with N
/// features realizes exactly N points, which is what lets the recovery loop
/// fix the number of vertices to draw. The natural support is the disk of
/// radius sqrt(N); `scale` maps that disk onto the circle circumscribing the
/// domain square, and draws are restricted to the square by rejection.
struct GinibreKernel {
    int trunc = 1;       // N: number of basis functions
    double scale = 1.0;  // target length units per sampling-plane unit
    Domain domain;
};

/// Kernel sized for `total_points` = conditioning set + points to draw, with a
/// 25% margin so the conditional density stays well-posed near the disk edge.
inline GinibreKernel make_ginibre_kernel(const Domain& d, int total_points) {
    GinibreKernel k;
    k.trunc = std::max(1, static_cast<int>(std::ceil(1.25 * total_points)));
    k.domain = d;
    const double circumradius = d.side * std::numbers::sqrt2 / 2.0;
    k.scale = circumradius / std::sqrt(static_cast<double>(k.trunc));
    return k;
}

/// phi_k(z), evaluated through logs so k! never overflows.
inline std::complex<double> basis_eval(int k, std::complex<double> z) {
    if (k < 0) throw std::invalid_argument("basis_eval: k must be >= 0");
    const double az = std::abs(z);
    if (k == 0)
        return std::exp(-az * az / 2.0) / std::sqrt(std::numbers::pi) * std::complex<double>(1.0, 0.0);
    if (az == 0.0) return {0.0, 0.0};
    const double logmag = -az * az / 2.0 + k * std::log(az)
                          - 0.5 * (std::log(std::numbers::pi) + std::lgamma(static_cast<double>(k) + 1.0));
    return std::polar(std::exp(logmag), k * std::arg(z));
}

namespace detail {

/// Full feature vector (phi_0..phi_{N-1})(z) by the stable recurrence
/// phi_{k+1} = phi_k * z / sqrt(k+1); every intermediate magnitude is <= 1.
inline void fill_features(std::complex<double> z, std::span<std::complex<double>> out) {
    if (out.empty()) return;
    const double az2 = std::norm(z);
    out[0] = std::exp(-az2 / 2.0) / std::sqrt(std::numbers::pi);
    for (std::size_t k = 1; k < out.size(); ++k)
        out[k] = out[k - 1] * z / std::sqrt(static_cast<double>(k));
}

}  // namespace detail

/// One-point correlation of the truncated kernel at z (sampling plane):
/// sum_{k<N} |phi_k(z)|^2. Approaches 1/pi in the bulk.
inline double kernel_diag(const GinibreKernel& kern, std::complex<double> z) {
    std::vector<std::complex<double>> f(static_cast<std::size_t>(kern.trunc));
    detail::fill_features(z, f);
    double s = 0.0;
    for (const auto& v : f) s += std::norm(v);
    return s;
}

/// Sequential sampler for the truncated Ginibre projection process,
/// conditioned on any points fed to `condition_on` first. It maintains an
/// orthonormal basis of the feature vectors of all placed points; the next
/// point is drawn by rejection from the density proportional to the squared
/// norm of the feature vector's projection onto the orthogonal complement,
/// restricted to the domain square. An accepted point is orthonormalized into
/// the basis so every draw sees all points placed before it.
class SamplerState {
public:
    SamplerState(const GinibreKernel& kern, std::uint64_t seed)
        : kern_(kern), rng_(make_engine(seed)) {
        probe_resid_.resize(kProbe * kProbe);
        const double cell = kern_.domain.side / kProbe;
        probe_points_.reserve(probe_resid_.size());
        for (int i = 0; i < kProbe; ++i)
            for (int j = 0; j < kProbe; ++j)
                probe_points_.push_back({(i + 0.5) * cell, (j + 0.5) * cell});
        for (std::size_t p = 0; p < probe_points_.size(); ++p)
            probe_resid_[p] = kernel_diag(kern_, to_plane(probe_points_[p]));
    }

    std::complex<double> to_plane(const Point2& p) const {
        const Point2 c = kern_.domain.center();
        return {(p.x - c.x) / kern_.scale, (p.y - c.y) / kern_.scale};
    }

    Point2 to_domain(std::complex<double> z) const {
        const Point2 c = kern_.domain.center();
        return {c.x + z.real() * kern_.scale, c.y + z.imag() * kern_.scale};
    }

    int placed() const { return static_cast<int>(basis_.size()); }
    const GinibreKernel& kernel() const { return kern_; }

    /// Register an already-present point as if it had been drawn first.
    void condition_on(const Point2& p) {
        if (!kern_.domain.contains(p))
            throw std::invalid_argument("SamplerState: conditioning point outside domain");
        auto f = features_at(to_plane(p));
        if (!insert(std::move(f)))
            throw over_constrained_error(
                "ginibre sampler: conditioning set is degenerate for this truncation");
    }

    /// Draw the next point restricted to the domain square.
    Point2 draw_in_square() {
        if (placed() >= kern_.trunc)
            throw over_constrained_error("ginibre sampler: kernel truncation exhausted");
        double envelope = 0.0;
        for (double v : probe_resid_) envelope = std::max(envelope, v);
        envelope *= kEnvelopeSafety;
        if (!(envelope > 1e-12))
            throw over_constrained_error("ginibre sampler: conditional density vanishes on the square");
        for (int attempt = 0; attempt < kMaxProposals; ++attempt) {
            const Point2 cand{uniform01(rng_) * kern_.domain.side,
                              uniform01(rng_) * kern_.domain.side};
            auto f = features_at(to_plane(cand));
            const double resid = residual_norm_sq(f);
            if (uniform01(rng_) * envelope < resid) {
                insert(std::move(f));
                return cand;
            }
        }
        throw over_constrained_error("ginibre sampler: rejection sampling failed to accept");
    }

    /// Draw the first point on the sampling disk, with no square restriction.
    /// Only valid before anything is placed; used to check the radial law.
    std::complex<double> draw_first_on_disk() {
        if (placed() != 0)
            throw std::logic_error("draw_first_on_disk: sampler already has points");
        const double radius = std::sqrt(static_cast<double>(kern_.trunc)) * 1.2;
        double envelope = 0.0;
        for (int i = 0; i < 256; ++i)
            envelope = std::max(envelope, kernel_diag(kern_, {radius * i / 255.0, 0.0}));
        envelope *= kEnvelopeSafety;
        for (int attempt = 0; attempt < kMaxProposals; ++attempt) {
            const double rho = radius * std::sqrt(uniform01(rng_));
            const double theta = 2.0 * std::numbers::pi * uniform01(rng_);
            const std::complex<double> z = std::polar(rho, theta);
            auto f = features_at(z);
            if (uniform01(rng_) * envelope < residual_norm_sq(f)) {
                insert(std::move(f));
                return z;
            }
        }
        throw over_constrained_error("ginibre sampler: disk draw failed to accept");
    }

    /// Largest deviation of the basis Gram matrix from identity.
    double orthonormality_drift() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            for (std::size_t j = i; j < basis_.size(); ++j) {
                std::complex<double> g = 0.0;
                for (std::size_t k = 0; k < basis_[i].size(); ++k)
                    g += std::conj(basis_[i][k]) * basis_[j][k];
                const double target = (i == j) ? 1.0 : 0.0;
                worst = std::max(worst, std::abs(g - std::complex<double>(target, 0.0)));
            }
        }
        return worst;
    }

private:
    static constexpr int kProbe = 64;
    static constexpr double kEnvelopeSafety = 1.5;
    static constexpr int kMaxProposals = 100000;
    static constexpr double kDriftTol = 1e-9;

    std::vector<std::complex<double>> features_at(std::complex<double> z) const {
        std::vector<std::complex<double>> f(static_cast<std::size_t>(kern_.trunc));
        detail::fill_features(z, f);
        return f;
    }

    double residual_norm_sq(const std::vector<std::complex<double>>& f) const {
        double total = 0.0;
        for (const auto& v : f) total += std::norm(v);
        for (const auto& e : basis_) {
            std::complex<double> c = 0.0;
            for (std::size_t k = 0; k < f.size(); ++k) c += std::conj(e[k]) * f[k];
            total -= std::norm(c);
        }
        return std::max(total, 0.0);
    }

    void project_out_basis(std::vector<std::complex<double>>& v) const {
        for (const auto& e : basis_) {
            std::complex<double> c = 0.0;
            for (std::size_t k = 0; k < v.size(); ++k) c += std::conj(e[k]) * v[k];
            for (std::size_t k = 0; k < v.size(); ++k) v[k] -= c * e[k];
        }
    }

    // Gram-Schmidt with one re-orthogonalization pass; drift stays ~1e-15.
    bool insert(std::vector<std::complex<double>> f) {
        double norm0 = 0.0;
        for (const auto& v : f) norm0 += std::norm(v);
        project_out_basis(f);
        project_out_basis(f);
        double rem = 0.0;
        for (const auto& v : f) rem += std::norm(v);
        if (!(rem > norm0 * 1e-24) || !(rem > 0.0)) return false;
        const double inv = 1.0 / std::sqrt(rem);
        for (auto& v : f) v *= inv;
        basis_.push_back(std::move(f));
        const auto& e = basis_.back();
        for (std::size_t p = 0; p < probe_points_.size(); ++p) {
            auto pf = features_at(to_plane(probe_points_[p]));
            std::complex<double> c = 0.0;
            for (std::size_t k = 0; k < pf.size(); ++k) c += std::conj(e[k]) * pf[k];
            probe_resid_[p] = std::max(probe_resid_[p] - std::norm(c), 0.0);
        }
        if (orthonormality_drift() > kDriftTol) reorthonormalize();
        return true;
    }

    void reorthonormalize() {
        auto old = std::move(basis_);
        basis_.clear();
        for (auto& v : old) {
            project_out_basis(v);
            double n = 0.0;
            for (const auto& c : v) n += std::norm(c);
            if (!(n > 0.0)) continue;
            const double inv = 1.0 / std::sqrt(n);
            for (auto& c : v) c *= inv;
            basis_.push_back(std::move(v));
        }
    }

    GinibreKernel kern_;
    std::mt19937_64 rng_;
    std::vector<std::vector<std::complex<double>>> basis_;
    std::vector<Point2> probe_points_;
    std::vector<double> probe_resid_;  // conditional density on the probe grid
};

/// Draw n_new points of the truncated Ginibre process on the domain square,
/// conditioned on the existing points as the first vertices of the process.
/// Deterministic given the seed.
inline std::vector<Point2> sample_conditioned(int n_new, const std::vector<Point2>& existing,
                                              const Domain& d, std::uint64_t seed) {
    if (n_new < 0) throw std::invalid_argument("sample_conditioned: n_new must be >= 0");
    std::vector<Point2> out;
    if (n_new == 0) return out;
    const GinibreKernel kern = make_ginibre_kernel(d, static_cast<int>(existing.size()) + n_new);
    SamplerState state(kern, seed);
    for (const auto& p : existing) state.condition_on(p);
    out.reserve(static_cast<std::size_t>(n_new));
    for (int i = 0; i < n_new; ++i) out.push_back(state.draw_in_square());
    return out;
}

}  // namespace covrec
