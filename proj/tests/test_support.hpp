#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

#include "boxloss/geom.hpp"
#include "boxloss/losses.hpp"

namespace testsup {

using boxloss::Boxd;

/// Deterministic generators for box pairs used across the suites.
struct BoxGen {
    std::mt19937_64 rng;

    explicit BoxGen(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }

    Boxd box() { return {uniform(-5, 5), uniform(-5, 5), uniform(0.2, 4), uniform(0.2, 4)}; }

    std::pair<Boxd, Boxd> overlapping_pair() {
        for (;;) {
            Boxd a = box();
            Boxd b{a.x + uniform(-0.45, 0.45) * a.w, a.y + uniform(-0.45, 0.45) * a.h,
                   uniform(0.2, 4), uniform(0.2, 4)};
            if (boxloss::intersection_area(a, b) > 0) return {a, b};
        }
    }

    std::pair<Boxd, Boxd> disjoint_pair() {
        for (;;) {
            Boxd a = box();
            Boxd b = box();
            const double dir = uniform(0, 2 * 3.14159265358979);
            const double gap = uniform(0.05, 4.0);
            const double shift_x = (a.w + b.w) / 2 + gap;
            const double shift_y = (a.h + b.h) / 2 + gap;
            Boxd moved{a.x + std::cos(dir) * shift_x, a.y + std::sin(dir) * shift_y, b.w, b.h};
            if (boxloss::intersection_area(a, moved) == 0) return {moved, a};
        }
    }

    /// inner box fully inside outer; optionally sharing the center exactly
    std::pair<Boxd, Boxd> containment_pair(bool concentric) {
        Boxd outer = box();
        const double w = outer.w * uniform(0.15, 0.9);
        const double h = outer.h * uniform(0.15, 0.9);
        double cx = outer.x, cy = outer.y;
        if (!concentric) {
            cx += uniform(-0.95, 0.95) * (outer.w - w) / 2;
            cy += uniform(-0.95, 0.95) * (outer.h - h) / 2;
        }
        return {Boxd{cx, cy, w, h}, outer};
    }
};

/// True when no min/max argument pair in the kernels is within tol of a tie
/// and the pair is not near edge-touching, so a central-difference stencil
/// of half-width tol never straddles a kink.
inline bool tie_free(const Boxd& p, const Boxd& g, double tol = 1e-4) {
    const double edges[4] = {p.left() - g.left(), p.right() - g.right(),
                             p.bottom() - g.bottom(), p.top() - g.top()};
    for (double d : edges)
        if (std::abs(d) < tol) return false;
    const double iw = std::min(p.right(), g.right()) - std::max(p.left(), g.left());
    const double ih = std::min(p.top(), g.top()) - std::max(p.bottom(), g.bottom());
    return std::abs(iw) > tol && std::abs(ih) > tol;
}

/// Componentwise relative disagreement between analytic and finite-difference
/// gradients. Components much smaller than the gradient's overall magnitude
/// are compared against that magnitude instead, since the oracle cannot
/// resolve them to full relative precision.
inline double gradient_rel_err(const boxloss::BoxGradient<double>& analytic,
                               const boxloss::BoxGradient<double>& numeric) {
    const double a[4] = {analytic.dx, analytic.dy, analytic.dw, analytic.dh};
    const double f[4] = {numeric.dx, numeric.dy, numeric.dw, numeric.dh};
    double magnitude = 1e-4;
    for (int k = 0; k < 4; ++k) magnitude = std::max({magnitude, std::abs(a[k]), std::abs(f[k])});
    double worst = 0;
    for (int k = 0; k < 4; ++k) {
        const double scale = std::max({std::abs(a[k]), std::abs(f[k]), 1e-3 * magnitude});
        worst = std::max(worst, std::abs(a[k] - f[k]) / scale);
    }
    return worst;
}

}  // namespace testsup
