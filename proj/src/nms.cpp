#include "boxloss/nms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>

#include "boxloss/geom.hpp"

namespace boxloss {

namespace {

double classic_criterion(const Boxd& kept, const Boxd& candidate) {
    return iou(kept, candidate);
}

double diou_criterion(const Boxd& kept, const Boxd& candidate) {
    const auto s = enclosure_stats(kept, candidate);
    return s.inter_area / s.union_area - s.center_dist_sq / s.enclose_diag_sq;
}

NmsOutcome run_nms(std::span<const Detection> detections, double eps,
                   double (*criterion)(const Boxd&, const Boxd&)) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("nms: eps must lie in (0, 1)");
    for (const Detection& d : detections) {
        if (!std::isfinite(d.score)) throw std::invalid_argument("nms: scores must be finite");
        if (d.class_id < 0) throw std::invalid_argument("nms: class_id must be >= 0");
    }

    // per-class candidate order: descending score, ties by input index
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < detections.size(); ++i)
        by_class[detections[i].class_id].push_back(i);

    NmsOutcome outcome;
    for (auto& [class_id, order] : by_class) {
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return detections[a].score > detections[b].score;
        });
        std::vector<std::size_t> kept_here;
        for (std::size_t idx : order) {
            std::optional<std::size_t> suppressor;
            for (std::size_t m : kept_here) {
                if (criterion(detections[m].box, detections[idx].box) >= eps) {
                    suppressor = m;
                    break;
                }
            }
            if (suppressor)
                outcome.suppressed.push_back({idx, *suppressor});
            else
                kept_here.push_back(idx);
        }
        outcome.kept_indices.insert(outcome.kept_indices.end(), kept_here.begin(),
                                    kept_here.end());
    }

    std::stable_sort(outcome.kept_indices.begin(), outcome.kept_indices.end(),
                     [&](std::size_t a, std::size_t b) {
                         if (detections[a].score != detections[b].score)
                             return detections[a].score > detections[b].score;
                         return a < b;
                     });
    outcome.kept.reserve(outcome.kept_indices.size());
    for (std::size_t i : outcome.kept_indices) outcome.kept.push_back(detections[i]);

    std::sort(outcome.suppressed.begin(), outcome.suppressed.end(),
              [](const SuppressionRecord& a, const SuppressionRecord& b) {
                  return a.suppressed_index < b.suppressed_index;
              });
    return outcome;
}

}  // namespace

NmsOutcome nms_classic(std::span<const Detection> detections, double eps) {
    return run_nms(detections, eps, classic_criterion);
}

NmsOutcome nms_diou(std::span<const Detection> detections, double eps) {
    return run_nms(detections, eps, diou_criterion);
}

}  // namespace boxloss
