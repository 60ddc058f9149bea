#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "boxloss/losses.hpp"

namespace boxloss {

/// Piecewise-constant step size over the iteration horizon:
/// eta = early for t <= 0.8T, mid for 0.8T < t <= 0.9T, late for t > 0.9T.
struct StepSchedule {
    double early = 0.1;
    double mid = 0.01;
    double late = 0.001;

    double at(int t, int horizon) const {
        if (t <= 0.8 * horizon) return early;
        if (t <= 0.9 * horizon) return mid;
        return late;
    }
};

/// Configuration of the controlled regression benchmark: anchors with
/// |scales| x |aspect_ratios| shapes at n_points scatter positions inside a
/// disk, each regressed against unit-area targets of every target ratio.
struct SimulationConfig {
    int n_points = 5000;
    double radius = 3.0;
    Eigen::Vector2d center{10.0, 10.0};
    std::vector<double> scales{0.5, 0.67, 0.75, 1.0, 1.33, 1.5, 2.0};
    std::vector<double> aspect_ratios{0.25, 1.0 / 3.0, 0.5, 1.0, 2.0, 3.0, 4.0};
    std::vector<double> target_ratios{0.25, 1.0 / 3.0, 0.5, 1.0, 2.0, 3.0, 4.0};
    int max_iters = 200;
    LossKind kind = LossKind::IoU;
    std::uint64_t seed = 0;
    StepSchedule schedule{};
    int threads = 0;  ///< 0 = hardware concurrency; has no effect on results

    std::size_t cases_per_point() const {
        return scales.size() * aspect_ratios.size() * target_ratios.size();
    }
    std::size_t total_cases() const { return cases_per_point() * std::size_t(n_points); }

    void validate() const;
};

/// One anchor/target pair of the benchmark, identified by scatter point,
/// anchor shape slot (scale-major) and target ratio index.
struct RegressionCase {
    Boxd anchor;
    Boxd target;
    int point_index;
    int slot;
    int target_index;
};

struct RunCaseResult {
    std::vector<double> trace;  ///< l1 error after each update, length = iters
    Boxd final_box;
    int clamp_events = 0;          ///< steps where w or h hit the lower clamp
    int loss_increase_events = 0;  ///< non-clamp steps where the loss went up
};

/// Regression error accumulated per iteration (rows) and scatter point
/// (columns); entry (t, n) sums the l1 error of every case at point n.
struct SimulationResult {
    Eigen::MatrixXd errors;
    std::uint64_t clamp_events = 0;
    std::uint64_t loss_increase_events = 0;
    std::uint64_t total_steps = 0;
};

struct SurfaceSample {
    double x;
    double y;
    double error;
};

/// Deterministic near-uniform scatter inside the disk: a sunflower lattice
/// whose global rotation is derived from the seed.
std::vector<Eigen::Vector2d> scatter_points(const SimulationConfig& cfg);

/// Unit-area target boxes at the configured center, one per target ratio.
std::vector<Boxd> target_boxes(const SimulationConfig& cfg);

/// Anchor with the given area and aspect ratio centered at p.
Boxd anchor_box(const Eigen::Vector2d& p, double area, double ratio);

/// All anchor/target cases in accumulation order: point-major, then shape
/// slot (scale-major), then target index.
std::vector<RegressionCase> generate_cases(const SimulationConfig& cfg);
std::vector<RegressionCase> cases_at_point(const SimulationConfig& cfg, const Eigen::Vector2d& p,
                                           int point_index);

/// Step direction used by the benchmark:
///   B_t = B_{t-1} - eta_t (2 - IoU_{t-1}) * descent_gradient(B_{t-1}, target).
///
/// This is the analytic loss gradient with one further optimization-step
/// modification in the spirit of the v-term's denominator removal: the
/// enclosing-box diagonal in the DIoU/CIoU center-distance penalty is held
/// constant. Differentiating through it rewards inflating the box to grow
/// the normalizer, which stalls convergence; with it frozen, disjoint boxes
/// translate straight toward the target. Loss values are never affected.
BoxGradient<double> descent_gradient(LossKind kind, const Boxd& pred, const Boxd& target);

/// Gradient-descent regression of one case under descent_gradient, with w
/// and h clamped to a small positive floor after each update.
RunCaseResult run_case(const Boxd& anchor, const Boxd& target, LossKind kind, int iters,
                       const StepSchedule& schedule = {});

/// Full benchmark over every case. Deterministic for a fixed config: cases
/// are independent and each scatter point's column is accumulated in a fixed
/// order, so the result is identical for any thread count.
SimulationResult simulate(const SimulationConfig& cfg);

/// Sum of each iteration's errors over all points (one value per row).
Eigen::VectorXd total_error_curve(const Eigen::MatrixXd& errors);

/// Final-iteration error per scatter point, paired with its position.
std::vector<SurfaceSample> final_error_surface(const Eigen::MatrixXd& errors,
                                               const std::vector<Eigen::Vector2d>& points);

}  // namespace boxloss
