#include "boxloss/detection_io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace boxloss {

namespace {

using nlohmann::json;

[[noreturn]] void fail_record(std::size_t index, const std::string& what) {
    throw DetectionParseError("detection record " + std::to_string(index) + ": " + what);
}

double number_field(const json& obj, const char* key, std::size_t index) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail_record(index, std::string("missing field '") + key + "'");
    if (!it->is_number()) fail_record(index, std::string("field '") + key + "' must be a number");
    return it->get<double>();
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

}  // namespace

std::string format_number(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

std::vector<Detection> parse_detections(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DetectionParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw DetectionParseError("top-level value must be an array");

    static const char* kFields[] = {"x", "y", "w", "h", "score", "class_id"};
    std::vector<Detection> dets;
    dets.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& rec = doc[i];
        if (!rec.is_object()) fail_record(i, "must be an object");
        for (const auto& [key, _] : rec.items()) {
            if (std::find_if(std::begin(kFields), std::end(kFields),
                             [&](const char* f) { return key == f; }) == std::end(kFields))
                fail_record(i, "unknown field '" + key + "'");
        }
        const double x = number_field(rec, "x", i);
        const double y = number_field(rec, "y", i);
        const double w = number_field(rec, "w", i);
        const double h = number_field(rec, "h", i);
        const double score = number_field(rec, "score", i);
        const auto class_it = rec.find("class_id");
        if (class_it == rec.end()) fail_record(i, "missing field 'class_id'");
        if (!class_it->is_number_integer()) fail_record(i, "field 'class_id' must be an integer");
        const auto class_id = class_it->get<std::int64_t>();
        if (class_id < 0) fail_record(i, "class_id must be >= 0");
        if (!(score >= 0.0 && score <= 1.0)) fail_record(i, "score must lie in [0, 1]");
        try {
            dets.push_back({Boxd(x, y, w, h), score, int(class_id)});
        } catch (const std::invalid_argument& e) {
            fail_record(i, e.what());
        }
    }
    return dets;
}

std::vector<Detection> read_detection_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DetectionParseError("cannot open detection file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_detections(buffer.str());
}

void write_detection_file(const std::filesystem::path& path, std::span<const Detection> dets) {
    json doc = json::array();
    for (const Detection& d : dets) {
        doc.push_back({{"x", d.box.x},
                       {"y", d.box.y},
                       {"w", d.box.w},
                       {"h", d.box.h},
                       {"score", d.score},
                       {"class_id", d.class_id}});
    }
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
}

void write_curve_csv(const std::filesystem::path& path, const Eigen::MatrixXd& errors) {
    const Eigen::VectorXd totals = total_error_curve(errors);
    auto out = open_output(path);
    out << "iter,total_error\n";
    for (Eigen::Index t = 0; t < totals.size(); ++t)
        out << (t + 1) << ',' << format_number(totals[t]) << '\n';
    if (!out) throw std::runtime_error("failed writing: " + path.string());
}

void write_surface_csv(const std::filesystem::path& path,
                       const std::vector<Eigen::Vector2d>& points,
                       const Eigen::MatrixXd& errors) {
    const auto surface = final_error_surface(errors, points);
    auto out = open_output(path);
    out << "x,y,final_error\n";
    for (const SurfaceSample& s : surface)
        out << format_number(s.x) << ',' << format_number(s.y) << ','
            << format_number(s.error) << '\n';
    if (!out) throw std::runtime_error("failed writing: " + path.string());
}

void write_run_manifest(const std::filesystem::path& path, const SimulationConfig& cfg) {
    json doc{{"command", "simulate"},
             {"loss", to_string(cfg.kind)},
             {"n_points", cfg.n_points},
             {"radius", cfg.radius},
             {"center", {cfg.center.x(), cfg.center.y()}},
             {"scales", cfg.scales},
             {"aspect_ratios", cfg.aspect_ratios},
             {"target_ratios", cfg.target_ratios},
             {"max_iters", cfg.max_iters},
             {"seed", cfg.seed},
             {"step_schedule", {{"early", cfg.schedule.early},
                                {"mid", cfg.schedule.mid},
                                {"late", cfg.schedule.late}}}};
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
}

}  // namespace boxloss
