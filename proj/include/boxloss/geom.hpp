#pragma once

#include <algorithm>

#include "boxloss/box.hpp"

namespace boxloss {

/// Joint geometry of a box pair: overlap, union, smallest enclosing box C,
/// squared diagonal of C and squared distance between the two centers.
template <typename Scalar = double>
struct EnclosureStats {
    Scalar inter_area;       ///< |A ∩ B|, 0 for disjoint or edge-touching pairs
    Scalar union_area;       ///< |A ∪ B| = area(A) + area(B) - inter_area
    Scalar enclose_area;     ///< area of C
    Scalar enclose_diag_sq;  ///< squared diagonal length of C
    Scalar center_dist_sq;   ///< squared Euclidean distance of the centers
};

namespace detail {

// All pair geometry is derived from the corner coordinates so that shared
// edges produce identical rounding: identical boxes give IoU exactly 1 and
// a contained box's overlap equals its own area bit for bit.
template <typename S>
struct Corners {
    S x1, x2, y1, y2;
    S w, h, area;

    explicit Corners(const Box<S>& b)
        : x1(b.left()), x2(b.right()), y1(b.bottom()), y2(b.top()),
          w(x2 - x1), h(y2 - y1), area(w * h) {}
};

template <typename S>
S intersection_area(const Corners<S>& a, const Corners<S>& b) {
    const S iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    const S ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    return (iw > S(0) && ih > S(0)) ? iw * ih : S(0);
}

// The straightforward a + b - inter rounds away from the containment
// identity |A ∪ B| = |outer|; detecting containment through the exact
// equality inter == area keeps it bitwise.
template <typename S>
S union_area(const Corners<S>& a, const Corners<S>& b, S inter) {
    if (inter == a.area) return b.area;
    if (inter == b.area) return a.area;
    return a.area + b.area - inter;
}

}  // namespace detail

/// Area of the overlap rectangle. Boxes sharing only an edge or corner
/// overlap with area 0; there is no epsilon inflation.
template <typename Scalar>
Scalar intersection_area(const Box<Scalar>& a, const Box<Scalar>& b) {
    return detail::intersection_area(detail::Corners<Scalar>(a), detail::Corners<Scalar>(b));
}

template <typename Scalar>
EnclosureStats<Scalar> enclosure_stats(const Box<Scalar>& a, const Box<Scalar>& b) {
    const detail::Corners<Scalar> ca(a), cb(b);
    EnclosureStats<Scalar> s;
    s.inter_area = detail::intersection_area(ca, cb);
    s.union_area = detail::union_area(ca, cb, s.inter_area);

    const Scalar cw = std::max(ca.x2, cb.x2) - std::min(ca.x1, cb.x1);
    const Scalar ch = std::max(ca.y2, cb.y2) - std::min(ca.y1, cb.y1);
    s.enclose_area = cw * ch;
    s.enclose_diag_sq = cw * cw + ch * ch;

    const Scalar dx = a.x - b.x;
    const Scalar dy = a.y - b.y;
    s.center_dist_sq = dx * dx + dy * dy;
    return s;
}

/// Intersection over union of two boxes (the localization metric).
template <typename Scalar>
Scalar iou(const Box<Scalar>& a, const Box<Scalar>& b) {
    const detail::Corners<Scalar> ca(a), cb(b);
    const Scalar inter = detail::intersection_area(ca, cb);
    return inter / detail::union_area(ca, cb, inter);
}

}  // namespace boxloss
