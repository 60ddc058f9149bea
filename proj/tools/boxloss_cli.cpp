// boxloss: bounding-box regression losses, descent benchmark and NMS.
//
// Subcommands:
//   simulate  run the gradient-descent benchmark, write curve/surface CSVs
//   loss      evaluate one loss (and optionally its gradient) on a box pair
//   nms       run classic or DIoU NMS over a detection JSON file

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "boxloss/detection_io.hpp"
#include "boxloss/losses.hpp"
#include "boxloss/nms.hpp"
#include "boxloss/simulator.hpp"

namespace {

using namespace boxloss;

Boxd parse_box(const std::string& text) {
    double v[4];
    char trailing;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf,%lf%c", &v[0], &v[1], &v[2], &v[3], &trailing) != 4)
        throw CLI::ValidationError("box must be given as x,y,w,h");
    try {
        return {v[0], v[1], v[2], v[3]};
    } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError(e.what());
    }
}

void print_field(const char* name, double value) {
    std::printf("%s = %s\n", name, format_number(value).c_str());
}

int cmd_simulate(SimulationConfig cfg, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);

    const SimulationResult result = simulate(cfg);
    const auto points = scatter_points(cfg);

    write_curve_csv(out_dir / "curve.csv", result.errors);
    write_surface_csv(out_dir / "surface.csv", points, result.errors);
    write_run_manifest(out_dir / "manifest.json", cfg);

    const Eigen::VectorXd curve = total_error_curve(result.errors);
    std::printf("loss=%s cases=%zu iters=%d\n", to_string(cfg.kind).c_str(), cfg.total_cases(),
                cfg.max_iters);
    print_field("final_total_error", curve[curve.size() - 1]);
    std::printf("clamp_events = %llu of %llu steps\n",
                (unsigned long long)result.clamp_events, (unsigned long long)result.total_steps);
    std::printf("wrote %s, %s, %s\n", (out_dir / "curve.csv").c_str(),
                (out_dir / "surface.csv").c_str(), (out_dir / "manifest.json").c_str());
    return 0;
}

int cmd_loss(LossKind kind, const Boxd& pred, const Boxd& target, bool with_grad) {
    const auto value = loss(kind, pred, target);
    print_field("loss", value.loss);
    print_field("iou", value.iou);
    print_field("penalty", value.penalty);
    if (with_grad) {
        const auto grad = gradient(kind, pred, target);
        print_field("dx", grad.dx);
        print_field("dy", grad.dy);
        print_field("dw", grad.dw);
        print_field("dh", grad.dh);
    }
    return 0;
}

int cmd_nms(const std::filesystem::path& input, const std::string& mode, double eps,
            const std::filesystem::path& output) {
    const std::vector<Detection> dets = read_detection_file(input);
    const NmsOutcome outcome =
        mode == "diou" ? nms_diou(dets, eps) : nms_classic(dets, eps);
    write_detection_file(output, outcome.kept);

    std::printf("mode=%s eps=%s: %zu kept, %zu suppressed\n", mode.c_str(),
                format_number(eps).c_str(), outcome.kept.size(), outcome.suppressed.size());
    std::map<int, std::pair<int, int>> per_class;  // class -> (kept, suppressed)
    for (std::size_t i : outcome.kept_indices) per_class[dets[i].class_id].first++;
    for (const auto& rec : outcome.suppressed)
        per_class[dets[rec.suppressed_index].class_id].second++;
    for (const auto& [class_id, counts] : per_class)
        std::printf("class %d: kept %d, suppressed %d\n", class_id, counts.first, counts.second);
    for (const auto& rec : outcome.suppressed)
        std::printf("suppressed %zu by %zu\n", rec.suppressed_index, rec.suppressor_index);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bounding-box regression loss toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run the gradient-descent regression benchmark");
    std::string sim_loss;
    std::string sim_center = "10,10";
    std::string sim_out;
    SimulationConfig cfg;
    sim->add_option("--loss", sim_loss, "loss kind: iou|giou|diou|ciou")
        ->required()
        ->check(CLI::IsMember({"iou", "giou", "diou", "ciou"}));
    sim->add_option("--points", cfg.n_points, "number of scatter points")->check(CLI::PositiveNumber);
    sim->add_option("--radius", cfg.radius, "scatter disk radius")->check(CLI::PositiveNumber);
    sim->add_option("--center", sim_center, "target center as x,y");
    sim->add_option("--iters", cfg.max_iters, "iteration horizon T")->check(CLI::PositiveNumber);
    sim->add_option("--seed", cfg.seed, "scatter rotation seed");
    sim->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
    sim->add_option("--out", sim_out, "output directory")->required();

    // loss
    auto* lss = app.add_subcommand("loss", "evaluate a loss on one box pair");
    std::string loss_kind, loss_pred, loss_target;
    bool with_grad = false;
    lss->add_option("--kind", loss_kind, "loss kind: iou|giou|diou|ciou")
        ->required()
        ->check(CLI::IsMember({"iou", "giou", "diou", "ciou"}));
    lss->add_option("--pred", loss_pred, "predicted box as x,y,w,h")->required();
    lss->add_option("--target", loss_target, "target box as x,y,w,h")->required();
    lss->add_flag("--grad", with_grad, "also print the analytic gradient");

    // nms
    auto* nms = app.add_subcommand("nms", "suppress redundant detections");
    std::string nms_input, nms_output, nms_mode = "classic";
    double nms_eps = 0.45;
    nms->add_option("--input", nms_input, "detection JSON file")->required();
    nms->add_option("--mode", nms_mode, "criterion: classic|diou")
        ->check(CLI::IsMember({"classic", "diou"}));
    nms->add_option("--eps", nms_eps, "suppression threshold in (0,1)");
    nms->add_option("--output", nms_output, "kept detections JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            cfg.kind = loss_kind_from_string(sim_loss);
            double cx, cy;
            char trailing;
            if (std::sscanf(sim_center.c_str(), "%lf,%lf%c", &cx, &cy, &trailing) != 2) {
                std::cerr << "error: --center must be given as x,y\n";
                return 1;
            }
            cfg.center = {cx, cy};
            return cmd_simulate(cfg, sim_out);
        }
        if (lss->parsed())
            return cmd_loss(loss_kind_from_string(loss_kind), parse_box(loss_pred),
                            parse_box(loss_target), with_grad);
        if (nms->parsed()) return cmd_nms(nms_input, nms_mode, nms_eps, nms_output);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.get_exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
