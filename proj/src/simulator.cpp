#include "boxloss/simulator.hpp"

#include <cmath>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace boxloss {

namespace {

constexpr double kMinSide = 1e-8;  // clamp floor for w and h after an update

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

void SimulationConfig::validate() const {
    if (n_points < 1) throw std::invalid_argument("SimulationConfig: n_points must be >= 1");
    if (!(radius > 0)) throw std::invalid_argument("SimulationConfig: radius must be positive");
    if (max_iters < 1) throw std::invalid_argument("SimulationConfig: max_iters must be >= 1");
    if (scales.empty() || aspect_ratios.empty() || target_ratios.empty())
        throw std::invalid_argument("SimulationConfig: scale/ratio lists must be non-empty");
    for (double s : scales)
        if (!(s > 0)) throw std::invalid_argument("SimulationConfig: scales must be positive");
    for (double r : aspect_ratios)
        if (!(r > 0)) throw std::invalid_argument("SimulationConfig: ratios must be positive");
    for (double r : target_ratios)
        if (!(r > 0)) throw std::invalid_argument("SimulationConfig: ratios must be positive");
    if (!(center.allFinite())) throw std::invalid_argument("SimulationConfig: center must be finite");
    if (threads < 0) throw std::invalid_argument("SimulationConfig: threads must be >= 0");
}

std::vector<Eigen::Vector2d> scatter_points(const SimulationConfig& cfg) {
    cfg.validate();
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    const double rotation =
        2.0 * std::numbers::pi * double(splitmix64(cfg.seed) >> 11) * 0x1.0p-53;

    std::vector<Eigen::Vector2d> pts;
    pts.reserve(std::size_t(cfg.n_points));
    for (int i = 0; i < cfg.n_points; ++i) {
        const double r = cfg.radius * std::sqrt((i + 0.5) / cfg.n_points);
        const double theta = i * golden_angle + rotation;
        pts.emplace_back(cfg.center.x() + r * std::cos(theta),
                         cfg.center.y() + r * std::sin(theta));
    }
    return pts;
}

std::vector<Boxd> target_boxes(const SimulationConfig& cfg) {
    std::vector<Boxd> targets;
    targets.reserve(cfg.target_ratios.size());
    for (double r : cfg.target_ratios)
        targets.emplace_back(cfg.center.x(), cfg.center.y(), std::sqrt(r), 1.0 / std::sqrt(r));
    return targets;
}

Boxd anchor_box(const Eigen::Vector2d& p, double area, double ratio) {
    return {p.x(), p.y(), std::sqrt(area * ratio), std::sqrt(area / ratio)};
}

std::vector<RegressionCase> cases_at_point(const SimulationConfig& cfg, const Eigen::Vector2d& p,
                                           int point_index) {
    const auto targets = target_boxes(cfg);
    std::vector<RegressionCase> cases;
    cases.reserve(cfg.cases_per_point());
    int slot = 0;
    for (double scale : cfg.scales) {
        for (double ratio : cfg.aspect_ratios) {
            const Boxd anchor = anchor_box(p, scale, ratio);
            for (int i = 0; i < int(targets.size()); ++i)
                cases.push_back({anchor, targets[i], point_index, slot, i});
            ++slot;
        }
    }
    return cases;
}

std::vector<RegressionCase> generate_cases(const SimulationConfig& cfg) {
    const auto points = scatter_points(cfg);
    std::vector<RegressionCase> cases;
    cases.reserve(cfg.total_cases());
    for (int n = 0; n < int(points.size()); ++n) {
        auto at_point = cases_at_point(cfg, points[n], n);
        cases.insert(cases.end(), at_point.begin(), at_point.end());
    }
    return cases;
}

namespace {

std::pair<LossValue<double>, BoxGradient<double>> loss_and_step(LossKind kind, const Boxd& pred,
                                                                const Boxd& target) {
    if (kind == LossKind::IoU || kind == LossKind::GIoU) return loss_and_gradient(kind, pred, target);

    const auto t = detail::pair_terms(pred, target);
    const double c2 = t.stats.enclose_diag_sq;
    const double penalty_base = t.stats.center_dist_sq / c2;
    double grad[4];
    for (int k = 0; k < 4; ++k) grad[k] = -t.d_iou[k] + t.d_dist_sq[k] / c2;

    LossValue<double> value{};
    value.iou = t.iou;
    value.penalty = penalty_base;
    if (kind == LossKind::CIoU) {
        const auto at = aspect_term(pred, target, t.iou);
        value.penalty += at.alpha * at.v;
        const auto [dv_dw, dv_dh] = aspect_ratio_gradient(pred, target);
        grad[2] += at.alpha * dv_dw;
        grad[3] += at.alpha * dv_dh;
    }
    value.loss = 1.0 - value.iou + value.penalty;
    return {value, BoxGradient<double>{grad[0], grad[1], grad[2], grad[3]}};
}

}  // namespace

BoxGradient<double> descent_gradient(LossKind kind, const Boxd& pred, const Boxd& target) {
    return loss_and_step(kind, pred, target).second;
}

RunCaseResult run_case(const Boxd& anchor, const Boxd& target, LossKind kind, int iters,
                       const StepSchedule& schedule) {
    if (iters < 1) throw std::invalid_argument("run_case: iters must be >= 1");

    RunCaseResult result{{}, anchor};
    result.trace.reserve(std::size_t(iters));

    Boxd box = anchor;
    auto [value, grad] = loss_and_step(kind, box, target);
    for (int t = 1; t <= iters; ++t) {
        const double scale = schedule.at(t, iters) * (2.0 - value.iou);
        double w = box.w - scale * grad.dw;
        double h = box.h - scale * grad.dh;
        bool clamped = false;
        if (w < kMinSide) { w = kMinSide; clamped = true; }
        if (h < kMinSide) { h = kMinSide; clamped = true; }
        box = Boxd(box.x - scale * grad.dx, box.y - scale * grad.dy, w, h);
        result.trace.push_back(l1_distance(box, target));

        auto [next_value, next_grad] = loss_and_step(kind, box, target);
        if (clamped)
            ++result.clamp_events;
        else if (next_value.loss > value.loss)
            ++result.loss_increase_events;
        value = next_value;
        grad = next_grad;
    }
    result.final_box = box;
    return result;
}

SimulationResult simulate(const SimulationConfig& cfg) {
    cfg.validate();
    const auto points = scatter_points(cfg);
    const auto targets = target_boxes(cfg);
    const int T = cfg.max_iters;
    const int N = cfg.n_points;

    SimulationResult result;
    result.errors = Eigen::MatrixXd::Zero(T, N);

    struct WorkerStats {
        std::uint64_t clamps = 0;
        std::uint64_t increases = 0;
    };

    // One case runs entirely inside one worker and writes only its own
    // point's column, accumulated in slot-then-target order; results are
    // therefore identical for any thread count.
    const auto run_point = [&](int n, WorkerStats& stats) {
        auto column = result.errors.col(n);
        for (double scale : cfg.scales) {
            for (double ratio : cfg.aspect_ratios) {
                const Boxd anchor = anchor_box(points[std::size_t(n)], scale, ratio);
                for (const Boxd& target : targets) {
                    const RunCaseResult rc = run_case(anchor, target, cfg.kind, T, cfg.schedule);
                    for (int t = 0; t < T; ++t) column[t] += rc.trace[std::size_t(t)];
                    stats.clamps += std::uint64_t(rc.clamp_events);
                    stats.increases += std::uint64_t(rc.loss_increase_events);
                }
            }
        }
    };

    unsigned n_threads = cfg.threads > 0 ? unsigned(cfg.threads) : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = std::min<unsigned>(n_threads, unsigned(N));

    if (n_threads == 1) {
        WorkerStats stats;
        for (int n = 0; n < N; ++n) run_point(n, stats);
        result.clamp_events = stats.clamps;
        result.loss_increase_events = stats.increases;
    } else {
        std::vector<WorkerStats> stats(n_threads);
        std::vector<std::exception_ptr> errors(n_threads);
        std::vector<std::thread> workers;
        workers.reserve(n_threads);
        for (unsigned w = 0; w < n_threads; ++w) {
            workers.emplace_back([&, w] {
                try {
                    for (int n = int(w); n < N; n += int(n_threads)) run_point(n, stats[w]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& worker : workers) worker.join();
        for (auto& err : errors)
            if (err) std::rethrow_exception(err);
        for (const auto& s : stats) {
            result.clamp_events += s.clamps;
            result.loss_increase_events += s.increases;
        }
    }

    result.total_steps = std::uint64_t(T) * cfg.total_cases();
    return result;
}

Eigen::VectorXd total_error_curve(const Eigen::MatrixXd& errors) {
    return errors.rowwise().sum();
}

std::vector<SurfaceSample> final_error_surface(const Eigen::MatrixXd& errors,
                                               const std::vector<Eigen::Vector2d>& points) {
    if (errors.cols() != Eigen::Index(points.size()))
        throw std::invalid_argument("final_error_surface: points/errors size mismatch");
    if (errors.rows() < 1)
        throw std::invalid_argument("final_error_surface: empty error matrix");

    std::vector<SurfaceSample> surface;
    surface.reserve(points.size());
    for (Eigen::Index n = 0; n < errors.cols(); ++n)
        surface.push_back({points[std::size_t(n)].x(), points[std::size_t(n)].y(),
                           errors(errors.rows() - 1, n)});
    return surface;
}

}  // namespace boxloss
