#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "boxloss/box.hpp"

namespace boxloss {

/// A scored, class-labeled box; the unit of non-maximum suppression.
struct Detection {
    Boxd box;
    double score;
    int class_id;
};

struct SuppressionRecord {
    std::size_t suppressed_index;  ///< index into the input list
    std::size_t suppressor_index;  ///< the kept detection that removed it
};

/// Result of one NMS pass. kept and suppressed partition the input per
/// class; kept is ordered by descending score (ties: smaller input index
/// first) and suppressed by ascending suppressed index.
struct NmsOutcome {
    std::vector<Detection> kept;
    std::vector<std::size_t> kept_indices;
    std::vector<SuppressionRecord> suppressed;
};

/// Greedy highest-score-first NMS per class; a detection is suppressed by a
/// kept higher-scored one of the same class when IoU >= eps.
NmsOutcome nms_classic(std::span<const Detection> detections, double eps);

/// Same greedy structure with the distance-aware criterion
/// IoU - rho^2(centers)/c^2 >= eps, which spares overlapping boxes whose
/// centers are far apart. Never suppresses more than nms_classic does for
/// one suppressor, since the criterion's left side is bounded by IoU.
NmsOutcome nms_diou(std::span<const Detection> detections, double eps);

}  // namespace boxloss
