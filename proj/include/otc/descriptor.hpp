#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "otc/image.hpp"

namespace otc {

inline constexpr int kNumOrientations = 8;
inline constexpr double kHBin = 0.05;

// Orientation j covers j * 22.5 degrees, returned in radians.
double orientation_angle(int j);

enum class DescriptorMode { gray, rgb };

// Partition of an N x N patch into N parallel strips perpendicular to the
// projection axis of one orientation. Strip ids are 0-based.
struct StripPartition {
    int size = 0;
    double angle = 0.0;
    std::vector<int> strip_of;  // size*size entries, row-major
    std::vector<int> counts;    // size entries, each >= 1
    bool repaired = false;      // an empty strip was rebalanced (defensive)
};

StripPartition strip_partition(int size, double angle);

// All 8 orientation partitions for one patch size, built once and cached.
const std::array<StripPartition, kNumOrientations>& strip_partitions(int size);

struct CurveSet {
    int size = 0;
    std::array<std::vector<double>, kNumOrientations> gray;                 // N points each
    std::array<std::vector<std::array<double, 3>>, kNumOrientations> rgb;  // N points each
};

CurveSet compute_curves(const PatchSample& patch,
                        const std::array<StripPartition, kNumOrientations>& partitions);

// Forward differences: out[i] = v[i+1] - v[i].
std::vector<double> curve_gradient(const std::vector<double>& v);

// Forward differences of the gradient.
std::vector<double> curve_curvature(const std::vector<double>& gradient);

// out[i] = sign(gray_gradient[i]) * ||V[i+1] - V[i]||_2, sign(0) = 0.
std::vector<double> rgb_gradient(const std::vector<std::array<double, 3>>& V,
                                 const std::vector<double>& gray_gradient);

// 1 + 8 * (2N - 3): leading constant bin plus per-orientation gradient and
// curvature values.
std::size_t descriptor_length(int size);

// Layout: [constant bin, then per orientation: gradient (N-1), curvature
// (N-2)], scaled to unit l2 norm. A patch with all-zero differences maps to
// the canonical vector (1, 0, ..., 0) exactly.
std::vector<double> assemble_descriptor(const CurveSet& curves, DescriptorMode mode);

std::vector<double> describe_patch(const PatchSample& patch, DescriptorMode mode);

}  // namespace otc
