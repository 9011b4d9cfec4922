#include "otc/eval.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace otc {

Metrics evaluate(const std::vector<TrajectoryRow>& trajectory,
                 const std::vector<GroundTruthRow>& ground_truth, double tau) {
    if (ground_truth.empty()) throw std::invalid_argument("evaluate: empty ground truth");
    if (tau <= 0) throw std::invalid_argument("evaluate: tau must be positive");

    std::unordered_map<int, const TrajectoryRow*> by_frame;
    by_frame.reserve(trajectory.size());
    for (const TrajectoryRow& row : trajectory) by_frame[row.frame] = &row;

    std::string missing;
    for (const GroundTruthRow& gt : ground_truth) {
        if (!by_frame.count(gt.frame)) {
            if (!missing.empty()) missing += ", ";
            missing += std::to_string(gt.frame);
        }
    }
    if (!missing.empty()) {
        throw std::runtime_error("evaluate: trajectory is missing frames " + missing);
    }

    Metrics metrics;
    double error_sum = 0.0;
    int successes = 0;
    for (const GroundTruthRow& gt : ground_truth) {
        const TrajectoryRow& row = *by_frame.at(gt.frame);
        const double err = std::hypot(row.cx - gt.cx, row.cy - gt.cy);
        error_sum += err;
        if (err <= tau) ++successes;
        if (row.lost) ++metrics.lost_frames;
    }
    metrics.frames_evaluated = static_cast<int>(ground_truth.size());
    metrics.mean_center_error = error_sum / metrics.frames_evaluated;
    metrics.success_rate = static_cast<double>(successes) / metrics.frames_evaluated;
    return metrics;
}

}  // namespace otc
