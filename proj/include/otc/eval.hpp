#pragma once

#include "otc/trajectory.hpp"

namespace otc {

struct Metrics {
    double mean_center_error = 0.0;
    double success_rate = 0.0;  // fraction of frames with center error <= tau
    int lost_frames = 0;
    int frames_evaluated = 0;
};

// Center errors per ground-truth frame; every ground-truth index must appear
// in the trajectory.
Metrics evaluate(const std::vector<TrajectoryRow>& trajectory,
                 const std::vector<GroundTruthRow>& ground_truth, double tau = 20.0);

}  // namespace otc
