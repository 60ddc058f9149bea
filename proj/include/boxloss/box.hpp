#pragma once

#include <cmath>
#include <stdexcept>

namespace boxloss {

/// Axis-aligned rectangle in center parameterization (x, y, w, h).
/// Width and height must be strictly positive and all fields finite;
/// construction rejects anything else.
template <typename Scalar = double>
class Box {
public:
    Scalar x;
    Scalar y;
    Scalar w;
    Scalar h;

    Box(Scalar cx, Scalar cy, Scalar width, Scalar height)
        : x(cx), y(cy), w(width), h(height) {
        if (!(std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(h)))
            throw std::invalid_argument("Box: fields must be finite");
        if (!(w > Scalar(0)) || !(h > Scalar(0)))
            throw std::invalid_argument("Box: width and height must be positive");
    }

    Scalar area() const { return w * h; }
    Scalar aspect() const { return w / h; }

    // corner form, used transiently inside kernels
    Scalar left() const { return x - w / Scalar(2); }
    Scalar right() const { return x + w / Scalar(2); }
    Scalar bottom() const { return y - h / Scalar(2); }
    Scalar top() const { return y + h / Scalar(2); }

    friend bool operator==(const Box& a, const Box& b) {
        return a.x == b.x && a.y == b.y && a.w == b.w && a.h == b.h;
    }
};

using Boxd = Box<double>;

/// l1 distance between two boxes in center parameterization:
/// |dx| + |dy| + |dw| + |dh|.
template <typename Scalar>
Scalar l1_distance(const Box<Scalar>& a, const Box<Scalar>& b) {
    using std::abs;
    return abs(a.x - b.x) + abs(a.y - b.y) + abs(a.w - b.w) + abs(a.h - b.h);
}

}  // namespace boxloss
