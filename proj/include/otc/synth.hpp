#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>

#include "otc/image.hpp"
#include "otc/trajectory.hpp"

namespace otc {

struct SynthParams {
    int width = 128;
    int height = 128;
    int target_w = 24;
    int target_h = 24;
    int frames = 60;
    double vel_x = 2.0;
    double vel_y = 0.0;
    std::uint64_t seed = 0;
    int distractors = 0;
    // Target center at frame 0; defaults to the path centered in the frame.
    std::optional<std::array<double, 2>> start;
};

struct SynthResult {
    std::vector<GroundTruthRow> gt;
    std::array<double, 2> start_center{};
};

// Smooth pseudo-random RGB texture: a coarse random lattice (one value per
// `cell` pixels) interpolated bilinearly. Smoothness keeps nearby patches
// similar, which dense texture matching needs.
Frame value_noise_frame(int width, int height, double cell, std::uint64_t seed);

// Deterministic textured background, a distinct textured target translating
// at constant velocity, and optional flat distractor squares in the target's
// mean color crossing its path behind it. Frames are written as
// frame_NNNN.ppm; the ground truth records the exact pasted position. Fails
// before writing anything if the target would leave the frame.
SynthResult synth_generate(const SynthParams& params, const std::filesystem::path& out_dir);

}  // namespace otc
