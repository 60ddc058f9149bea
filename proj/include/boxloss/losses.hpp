#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "boxloss/geom.hpp"

namespace boxloss {

enum class LossKind { IoU, GIoU, DIoU, CIoU };

inline std::string to_string(LossKind kind) {
    switch (kind) {
        case LossKind::IoU: return "iou";
        case LossKind::GIoU: return "giou";
        case LossKind::DIoU: return "diou";
        case LossKind::CIoU: return "ciou";
    }
    throw std::invalid_argument("unknown LossKind");
}

inline LossKind loss_kind_from_string(std::string_view name) {
    if (name == "iou") return LossKind::IoU;
    if (name == "giou") return LossKind::GIoU;
    if (name == "diou") return LossKind::DIoU;
    if (name == "ciou") return LossKind::CIoU;
    throw std::invalid_argument("unknown loss kind: " + std::string(name));
}

/// A loss evaluation decomposed as loss = 1 - iou + penalty.
template <typename Scalar = double>
struct LossValue {
    Scalar loss;
    Scalar iou;
    Scalar penalty;  ///< 0 for the plain IoU loss
};

/// Partial derivatives of a loss with respect to the predicted box's
/// (x, y, w, h). This is the ascent direction of the loss; consumers
/// descend by subtracting it.
template <typename Scalar = double>
struct BoxGradient {
    Scalar dx;
    Scalar dy;
    Scalar dw;
    Scalar dh;
};

/// Aspect-ratio consistency term v and its trade-off weight alpha.
template <typename Scalar = double>
struct AspectTerm {
    Scalar v;
    Scalar alpha;
};

namespace detail {

// Share of a min/max edge owned by the first (predicted) argument.
// Ties are split evenly between the two boxes, which makes the resulting
// subgradient agree with central differences at symmetric kinks and vanish
// exactly when the boxes coincide.
template <typename S>
S min_share(S p, S g) {
    return p < g ? S(1) : (p == g ? S(0.5) : S(0));
}

template <typename S>
S max_share(S p, S g) {
    return p > g ? S(1) : (p == g ? S(0.5) : S(0));
}

// Everything the four losses and their gradients need for one box pair,
// computed in a single pass. Index order of the derivative arrays is
// x, y, w, h of the predicted box.
template <typename S>
struct PairTerms {
    EnclosureStats<S> stats;
    S iou;
    S d_iou[4];
    S d_union[4];
    S d_enclose_area[4];
    S d_diag_sq[4];
    S d_dist_sq[4];
};

template <typename S>
PairTerms<S> pair_terms(const Box<S>& pred, const Box<S>& target) {
    PairTerms<S> t{};
    t.stats = enclosure_stats(pred, target);

    const boxloss::detail::Corners<S> p(pred), g(target);

    const S iw = std::min(p.x2, g.x2) - std::max(p.x1, g.x1);
    const S ih = std::min(p.y2, g.y2) - std::max(p.y1, g.y1);

    // intersection derivatives; identically zero once the boxes separate
    S d_inter[4] = {S(0), S(0), S(0), S(0)};
    if (iw > S(0) && ih > S(0)) {
        const S mr = min_share(p.x2, g.x2), ml = max_share(p.x1, g.x1);
        const S mb = min_share(p.y2, g.y2), mt = max_share(p.y1, g.y1);
        d_inter[0] = (mr - ml) * ih;
        d_inter[1] = iw * (mb - mt);
        d_inter[2] = (mr + ml) / S(2) * ih;
        d_inter[3] = iw * (mb + mt) / S(2);
    }

    // the predicted area's derivatives use the corner-derived extents so
    // that the cancellation at a perfect match is exact
    const S d_area[4] = {S(0), S(0), p.h, p.w};
    const S uni = t.stats.union_area;
    for (int k = 0; k < 4; ++k) {
        t.d_union[k] = d_area[k] - d_inter[k];
        t.d_iou[k] = (d_inter[k] * uni - t.stats.inter_area * t.d_union[k]) / (uni * uni);
    }
    t.iou = t.stats.inter_area / uni;

    // smallest enclosing box C
    const S cw = std::max(p.x2, g.x2) - std::min(p.x1, g.x1);
    const S ch = std::max(p.y2, g.y2) - std::min(p.y1, g.y1);
    const S er = max_share(p.x2, g.x2), el = min_share(p.x1, g.x1);
    const S eb = max_share(p.y2, g.y2), et = min_share(p.y1, g.y1);
    const S d_cw[4] = {er - el, S(0), (er + el) / S(2), S(0)};
    const S d_ch[4] = {S(0), eb - et, S(0), (eb + et) / S(2)};
    for (int k = 0; k < 4; ++k) {
        t.d_enclose_area[k] = d_cw[k] * ch + cw * d_ch[k];
        t.d_diag_sq[k] = S(2) * (cw * d_cw[k] + ch * d_ch[k]);
    }

    t.d_dist_sq[0] = S(2) * (pred.x - target.x);
    t.d_dist_sq[1] = S(2) * (pred.y - target.y);
    t.d_dist_sq[2] = S(0);
    t.d_dist_sq[3] = S(0);
    return t;
}

template <typename S>
S arctan_gap(const Box<S>& pred, const Box<S>& target) {
    return std::atan(target.w / target.h) - std::atan(pred.w / pred.h);
}

}  // namespace detail

/// Aspect-ratio consistency v = (4/pi^2)(arctan(wt/ht) - arctan(w/h))^2 and
/// its trade-off alpha = v / ((1 - iou) + v). The 0/0 case at a perfect
/// match (v = 0, iou = 1) resolves to alpha = 0.
template <typename Scalar>
AspectTerm<Scalar> aspect_term(const Box<Scalar>& pred, const Box<Scalar>& target, Scalar iou) {
    constexpr Scalar four_over_pi_sq =
        Scalar(4) / (std::numbers::pi_v<Scalar> * std::numbers::pi_v<Scalar>);
    const Scalar gap = detail::arctan_gap(pred, target);
    const Scalar v = four_over_pi_sq * gap * gap;
    const Scalar denom = (Scalar(1) - iou) + v;
    const Scalar alpha = (v == Scalar(0) || denom == Scalar(0)) ? Scalar(0) : v / denom;
    return {v, alpha};
}

/// Gradient of v with respect to the predicted (w, h), with the 1/(w^2+h^2)
/// factor replaced by 1 for stable convergence. Only the direction of the
/// exact derivative is preserved:
///   dv/dw = -(8/pi^2) * gap * h,   dv/dh = +(8/pi^2) * gap * w.
template <typename Scalar>
std::pair<Scalar, Scalar> aspect_ratio_gradient(const Box<Scalar>& pred,
                                                const Box<Scalar>& target) {
    constexpr Scalar eight_over_pi_sq =
        Scalar(8) / (std::numbers::pi_v<Scalar> * std::numbers::pi_v<Scalar>);
    const Scalar gap = detail::arctan_gap(pred, target);
    return {-eight_over_pi_sq * gap * pred.h, eight_over_pi_sq * gap * pred.w};
}

/// Loss value and its analytic gradient in one pass. The value satisfies
/// loss = 1 - iou + penalty exactly; the gradient is the ascent direction.
///
/// CIoU follows the DIoU gradient with two modifications to the aspect term:
/// alpha is treated as a constant, and the v-gradient drops its 1/(w^2+h^2)
/// denominator. Both apply to the gradient only, never to the value.
template <typename Scalar>
std::pair<LossValue<Scalar>, BoxGradient<Scalar>> loss_and_gradient(LossKind kind,
                                                                    const Box<Scalar>& pred,
                                                                    const Box<Scalar>& target) {
    const auto t = detail::pair_terms(pred, target);
    LossValue<Scalar> value{};
    value.iou = t.iou;

    Scalar penalty = Scalar(0);
    Scalar grad[4] = {-t.d_iou[0], -t.d_iou[1], -t.d_iou[2], -t.d_iou[3]};

    switch (kind) {
        case LossKind::IoU:
            break;
        case LossKind::GIoU: {
            const Scalar c = t.stats.enclose_area;
            // the max guards against C < U by one ulp when the union tiles C
            penalty = std::max(Scalar(0), (c - t.stats.union_area) / c);
            for (int k = 0; k < 4; ++k)
                grad[k] += (t.stats.union_area * t.d_enclose_area[k] - c * t.d_union[k]) / (c * c);
            break;
        }
        case LossKind::DIoU:
        case LossKind::CIoU: {
            const Scalar c2 = t.stats.enclose_diag_sq;
            const Scalar rho2 = t.stats.center_dist_sq;
            penalty = rho2 / c2;
            for (int k = 0; k < 4; ++k)
                grad[k] += (t.d_dist_sq[k] * c2 - rho2 * t.d_diag_sq[k]) / (c2 * c2);
            if (kind == LossKind::CIoU) {
                const auto at = aspect_term(pred, target, t.iou);
                penalty += at.alpha * at.v;
                const auto [dv_dw, dv_dh] = aspect_ratio_gradient(pred, target);
                grad[2] += at.alpha * dv_dw;
                grad[3] += at.alpha * dv_dh;
            }
            break;
        }
    }

    value.penalty = penalty;
    value.loss = Scalar(1) - value.iou + penalty;
    return {value, BoxGradient<Scalar>{grad[0], grad[1], grad[2], grad[3]}};
}

template <typename Scalar>
LossValue<Scalar> loss(LossKind kind, const Box<Scalar>& pred, const Box<Scalar>& target) {
    return loss_and_gradient(kind, pred, target).first;
}

template <typename Scalar>
BoxGradient<Scalar> gradient(LossKind kind, const Box<Scalar>& pred, const Box<Scalar>& target) {
    return loss_and_gradient(kind, pred, target).second;
}

/// Central-difference approximation of the loss gradient; the verification
/// oracle for the analytic kernels. Requires the perturbed boxes to stay
/// valid, i.e. step < min(w, h).
template <typename Scalar>
BoxGradient<Scalar> fd_gradient(LossKind kind, const Box<Scalar>& pred, const Box<Scalar>& target,
                                Scalar step = Scalar(1e-6)) {
    if (!(step > Scalar(0)))
        throw std::invalid_argument("fd_gradient: step must be positive");
    if (!(pred.w - step > Scalar(0)) || !(pred.h - step > Scalar(0)))
        throw std::invalid_argument("fd_gradient: step too large, perturbed box degenerates");

    const auto eval = [&](const Box<Scalar>& b) { return loss(kind, b, target).loss; };
    const Scalar inv = Scalar(1) / (Scalar(2) * step);
    BoxGradient<Scalar> g{};
    g.dx = (eval({pred.x + step, pred.y, pred.w, pred.h}) -
            eval({pred.x - step, pred.y, pred.w, pred.h})) * inv;
    g.dy = (eval({pred.x, pred.y + step, pred.w, pred.h}) -
            eval({pred.x, pred.y - step, pred.w, pred.h})) * inv;
    g.dw = (eval({pred.x, pred.y, pred.w + step, pred.h}) -
            eval({pred.x, pred.y, pred.w - step, pred.h})) * inv;
    g.dh = (eval({pred.x, pred.y, pred.w, pred.h + step}) -
            eval({pred.x, pred.y, pred.w, pred.h - step})) * inv;
    return g;
}

}  // namespace boxloss
