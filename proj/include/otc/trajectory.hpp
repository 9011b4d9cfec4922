#pragma once

#include <filesystem>
#include <vector>

namespace otc {

struct TrajectoryRow {
    int frame = 0;
    double cx = 0, cy = 0, w = 0, h = 0;
    double rho = 0;
    int iters = 0;
    int lost = 0;
};

struct GroundTruthRow {
    int frame = 0;
    double cx = 0, cy = 0, w = 0, h = 0;
};

// CSV with header `frame,cx,cy,w,h,rho,iters,lost`; reals with 6 decimals.
void write_trajectory_csv(const std::vector<TrajectoryRow>& rows, const std::filesystem::path& path);
std::vector<TrajectoryRow> read_trajectory_csv(const std::filesystem::path& path);

// Same layout minus the rho/iters/lost columns.
void write_gt_csv(const std::vector<GroundTruthRow>& rows, const std::filesystem::path& path);
std::vector<GroundTruthRow> read_gt_csv(const std::filesystem::path& path);

}  // namespace otc
