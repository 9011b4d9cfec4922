#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "otc/codebook.hpp"
#include "otc/descriptor.hpp"
#include "otc/image.hpp"

namespace otc {

struct TrackConfig {
    int max_iters = 20;
    double epsilon = 0.5;  // pixels; stop once the shift is shorter than this
    double clamp = 1e-6;   // floor for candidate bins inside the weight ratio
    int patch_size = 13;
    int stride = 3;
    std::uint32_t k = 100;
    std::uint64_t seed = 0;
    DescriptorMode mode = DescriptorMode::rgb;
};

struct TargetModel {
    Codebook codebook;
    HistogramPDF target_pdf;
    double box_w = 0;
    double box_h = 0;
    GridSpec grid;
    DescriptorMode mode = DescriptorMode::rgb;
};

// Dense descriptors inside init_box feed the vocabulary; the target PDF is
// their kernel-weighted word histogram about the box center.
TargetModel build_target_model(const Frame& frame, const BBox& init_box, const TrackConfig& config);

// sum_u sqrt(a_u * b_u), clamped to [0, 1].
double bhattacharyya(const HistogramPDF& a, const HistogramPDF& b);

// sqrt(1 - rho).
double bhattacharyya_distance(double rho);

// Per-patch weights sqrt(target_u / max(candidate_u, clamp)) for the patch's
// word u; zero whenever the word is absent from the target.
std::vector<double> compute_weights(const HistogramPDF& target, const HistogramPDF& candidate,
                                    const std::vector<std::uint32_t>& words, double clamp);

// Weighted centroid of the patch centers inside the unit ellipse about y0,
// minus y0. Empty when no in-ellipse patch carries positive weight.
std::optional<std::array<double, 2>> mean_shift_vector(
    const std::vector<std::array<double, 2>>& centers, const std::vector<double>& weights,
    const std::array<double, 2>& y0, double w, double h);

struct FrameResult {
    std::array<double, 2> center{};
    double rho_initial = 0.0;  // similarity at the starting center
    double rho_final = 0.0;    // similarity at the returned center
    int iterations = 0;
    bool converged = false;
    bool lost = false;
};

// Iterates candidate evaluation and shifting from y_prev until the shift is
// below epsilon or max_iters is reached; the candidate box stays inside the
// frame. Lost means the first iteration had zero similarity and no weight.
FrameResult track_frame(const TargetModel& model, const Frame& frame,
                        const std::array<double, 2>& y_prev, const TrackConfig& config);

// Frame t's center seeds frame t+1; a lost frame keeps the previous center.
std::vector<FrameResult> track_sequence(const TargetModel& model, const std::vector<Frame>& frames,
                                        const std::array<double, 2>& init_center,
                                        const TrackConfig& config);

}  // namespace otc
