#include <doctest.h>

#include "boxloss/losses.hpp"
#include "test_support.hpp"

using namespace boxloss;

namespace {
const LossKind kAllKinds[] = {LossKind::IoU, LossKind::GIoU, LossKind::DIoU, LossKind::CIoU};
}

TEST_CASE("loss kind names round-trip") {
    for (LossKind kind : kAllKinds) CHECK(loss_kind_from_string(to_string(kind)) == kind);
    CHECK_THROWS_AS(loss_kind_from_string("smooth_l1"), std::invalid_argument);
}

TEST_CASE("perfect match gives zero loss for every kind") {
    const Boxd b(3.5, -2.0, 1.7, 0.6);
    for (LossKind kind : kAllKinds) {
        const auto v = loss(kind, b, b);
        CHECK(v.loss == 0.0);
        CHECK(v.iou == 1.0);
        CHECK(v.penalty == 0.0);
    }
}

TEST_CASE("known loss values") {
    SUBCASE("unit box concentric inside a 2x2 box") {
        // containment forces the GIoU penalty to vanish; concentric centers
        // force the DIoU penalty to vanish
        const Boxd pred(0, 0, 1, 1), target(0, 0, 2, 2);
        const auto li = loss(LossKind::IoU, pred, target);
        const auto lg = loss(LossKind::GIoU, pred, target);
        const auto ld = loss(LossKind::DIoU, pred, target);
        CHECK(li.loss == 0.75);
        CHECK(lg.loss == 0.75);
        CHECK(lg.loss == li.loss);
        CHECK(ld.loss == li.loss);
    }
    SUBCASE("disjoint unit boxes, 3 apart") {
        const Boxd pred(0, 0, 1, 1), target(3, 0, 1, 1);
        CHECK(loss(LossKind::GIoU, pred, target).loss == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(loss(LossKind::DIoU, pred, target).loss ==
              doctest::Approx(1.0 + 9.0 / 17.0).epsilon(1e-12));
        // equal aspect ratios: CIoU degenerates to DIoU
        CHECK(loss(LossKind::CIoU, pred, target).loss ==
              loss(LossKind::DIoU, pred, target).loss);
    }
    SUBCASE("far separation drives GIoU and DIoU losses toward 2") {
        const Boxd pred(0, 0, 1, 1);
        double prev_g = 0, prev_d = 0;
        for (double sep : {10.0, 100.0, 1000.0, 1e6}) {
            const Boxd target(sep, 0, 1, 1);
            const double g = loss(LossKind::GIoU, pred, target).loss;
            const double d = loss(LossKind::DIoU, pred, target).loss;
            CHECK(g > prev_g);
            CHECK(d > prev_d);
            CHECK(g < 2.0);
            CHECK(d < 2.0);
            prev_g = g;
            prev_d = d;
        }
        CHECK(prev_g > 1.999);
        CHECK(prev_d > 1.999);
    }
}

TEST_CASE("aspect term") {
    SUBCASE("equal ratios give v = 0, alpha = 0") {
        const auto at = aspect_term(Boxd(0, 0, 2, 1), Boxd(5, 5, 4, 2), 0.3);
        CHECK(at.v == 0.0);
        CHECK(at.alpha == 0.0);
    }
    SUBCASE("1:1 against 4:1") {
        const Boxd pred(0, 0, 1, 1), target(0, 0, 2, 0.5);
        const auto at = aspect_term(pred, target, 0.5);
        // frozen from independent numeric evaluation
        CHECK(at.v == doctest::Approx(0.11836471834290445).epsilon(1e-12));
        CHECK(at.alpha == doctest::Approx(0.1914157047318265).epsilon(1e-12));
        CHECK(at.v == doctest::Approx(0.1183).epsilon(1e-3));
        CHECK(at.alpha == doctest::Approx(0.1913).epsilon(1e-3));
    }
    SUBCASE("perfect-match 0/0 resolves to zero") {
        const auto at = aspect_term(Boxd(0, 0, 1, 1), Boxd(0, 0, 1, 1), 1.0);
        CHECK(at.alpha == 0.0);
    }
    SUBCASE("alpha is strictly increasing in v at fixed iou") {
        const double iou = 0.4;
        double prev = -1;
        for (double ratio : {1.2, 1.5, 2.0, 3.0, 4.0}) {
            const auto at =
                aspect_term(Boxd(0, 0, 1, 1), Boxd(0, 0, std::sqrt(ratio), 1 / std::sqrt(ratio)),
                            iou);
            CHECK(at.alpha > prev);
            CHECK(at.alpha < 1.0);
            prev = at.alpha;
        }
    }
}

TEST_CASE("decomposition loss = 1 - iou + penalty is exact") {
    testsup::BoxGen gen(21);
    for (int i = 0; i < 400; ++i) {
        const auto [p, g] = (i % 2 == 0) ? gen.overlapping_pair() : gen.disjoint_pair();
        for (LossKind kind : kAllKinds) {
            const auto v = loss(kind, p, g);
            CHECK(v.loss == 1.0 - v.iou + v.penalty);
            CHECK(v.iou >= 0.0);
            CHECK(v.iou <= 1.0);
            CHECK(v.penalty >= 0.0);
        }
    }
}

TEST_CASE("value ranges per kind") {
    testsup::BoxGen gen(22);
    for (int i = 0; i < 400; ++i) {
        const auto [p, g] = (i % 2 == 0) ? gen.overlapping_pair() : gen.disjoint_pair();
        CHECK(loss(LossKind::IoU, p, g).loss <= 1.0);
        CHECK(loss(LossKind::GIoU, p, g).loss < 2.0);
        CHECK(loss(LossKind::DIoU, p, g).loss < 2.0);
        CHECK(loss(LossKind::CIoU, p, g).loss < 3.0);
        for (LossKind kind : kAllKinds) CHECK(loss(kind, p, g).loss >= 0.0);
    }
}

TEST_CASE("loss ordering: DIoU >= IoU and CIoU >= DIoU") {
    testsup::BoxGen gen(23);
    for (int i = 0; i < 400; ++i) {
        const auto [p, g] = (i % 2 == 0) ? gen.overlapping_pair() : gen.disjoint_pair();
        const double li = loss(LossKind::IoU, p, g).loss;
        const double ld = loss(LossKind::DIoU, p, g).loss;
        const double lc = loss(LossKind::CIoU, p, g).loss;
        const double lg = loss(LossKind::GIoU, p, g).loss;
        CHECK(ld >= li);
        CHECK(lc >= ld);
        CHECK(lg >= li);
        if (p.x == g.x && p.y == g.y) CHECK(ld == li);
        if (p.x != g.x || p.y != g.y) CHECK(ld > li);
    }
    // equality cases
    const Boxd a(1, 1, 2, 1), b(1, 1, 3, 0.5);
    CHECK(loss(LossKind::DIoU, a, b).loss == loss(LossKind::IoU, a, b).loss);
    const Boxd c(0, 0, 2, 1), d(4, 2, 4, 2);  // equal aspect ratio
    CHECK(loss(LossKind::CIoU, c, d).loss == loss(LossKind::DIoU, c, d).loss);
}

TEST_CASE("scale and translation invariance of loss values") {
    testsup::BoxGen gen(24);
    for (int i = 0; i < 200; ++i) {
        const auto [p, g] = (i % 2 == 0) ? gen.overlapping_pair() : gen.disjoint_pair();
        for (LossKind kind : kAllKinds) {
            const double base = loss(kind, p, g).loss;
            if (base < 1e-3) continue;
            for (double k : {1e-3, 1.0, 1e3}) {
                const double scaled = loss(kind, Boxd(k * p.x, k * p.y, k * p.w, k * p.h),
                                           Boxd(k * g.x, k * g.y, k * g.w, k * g.h))
                                          .loss;
                CHECK(std::abs(scaled - base) <= 1e-12 * base);
            }
            const double tx = gen.uniform(-50, 50), ty = gen.uniform(-50, 50);
            const double shifted = loss(kind, Boxd(p.x + tx, p.y + ty, p.w, p.h),
                                        Boxd(g.x + tx, g.y + ty, g.w, g.h))
                                       .loss;
            CHECK(std::abs(shifted - base) <= 1e-12 * base);
        }
    }
}

TEST_CASE("containment degeneracy: GIoU equals IoU, concentric adds DIoU") {
    testsup::BoxGen gen(25);
    for (int i = 0; i < 300; ++i) {
        const auto [inner, outer] = gen.containment_pair(false);
        CHECK(loss(LossKind::GIoU, inner, outer).loss == loss(LossKind::IoU, inner, outer).loss);
        CHECK(loss(LossKind::GIoU, outer, inner).loss == loss(LossKind::IoU, outer, inner).loss);

        const auto [cin, cout] = gen.containment_pair(true);
        CHECK(loss(LossKind::GIoU, cin, cout).loss == loss(LossKind::IoU, cin, cout).loss);
        CHECK(loss(LossKind::DIoU, cin, cout).loss == loss(LossKind::IoU, cin, cout).loss);
    }
}

TEST_CASE("losses work with float scalars too") {
    using BoxF = Box<float>;
    const BoxF p(0.f, 0.f, 1.f, 1.f), g(0.5f, 0.f, 1.f, 2.f);
    for (LossKind kind : kAllKinds) {
        const auto v = loss(kind, p, g);
        CHECK(v.loss == doctest::Approx(1.0f - v.iou + v.penalty).epsilon(1e-6));
        CHECK(std::isfinite(v.loss));
    }
}
