#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "boxloss/nms.hpp"
#include "boxloss/simulator.hpp"

namespace boxloss {

/// Raised on any malformed detection file; the message names the offending
/// record index where one exists.
class DetectionParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Detection file format: a JSON array of {x, y, w, h, score, class_id}
/// objects, coordinates in center parameterization. Unknown fields are
/// rejected, scores must lie in [0, 1].
std::vector<Detection> parse_detections(const std::string& text);
std::vector<Detection> read_detection_file(const std::filesystem::path& path);
void write_detection_file(const std::filesystem::path& path, std::span<const Detection> dets);

/// Convergence curve: header "iter,total_error", one row per iteration with
/// the error summed over all scatter points.
void write_curve_csv(const std::filesystem::path& path, const Eigen::MatrixXd& errors);

/// Final-iteration surface: header "x,y,final_error", one row per point.
void write_surface_csv(const std::filesystem::path& path,
                       const std::vector<Eigen::Vector2d>& points,
                       const Eigen::MatrixXd& errors);

/// Run provenance: the fully resolved simulation config as JSON.
void write_run_manifest(const std::filesystem::path& path, const SimulationConfig& cfg);

/// Shortest-width formatting with 12 significant digits, shared by all
/// text artifacts.
std::string format_number(double value);

}  // namespace boxloss
