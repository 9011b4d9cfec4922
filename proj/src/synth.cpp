#include "otc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace otc {

namespace {

struct Placement {
    int x = 0;
    int y = 0;
};

void paste(Frame& canvas, const Frame& block, int x0, int y0) {
    const int xa = std::max(0, x0);
    const int ya = std::max(0, y0);
    const int xb = std::min(canvas.width, x0 + block.width);
    const int yb = std::min(canvas.height, y0 + block.height);
    for (int y = ya; y < yb; ++y) {
        for (int x = xa; x < xb; ++x) {
            const std::uint8_t* src = block.at(x - x0, y - y0);
            std::uint8_t* dst = canvas.at(x, y);
            dst[0] = src[0];
            dst[1] = src[1];
            dst[2] = src[2];
        }
    }
}

void fill_rect(Frame& canvas, int x0, int y0, int w, int h, const std::array<std::uint8_t, 3>& color) {
    const int xa = std::max(0, x0);
    const int ya = std::max(0, y0);
    const int xb = std::min(canvas.width, x0 + w);
    const int yb = std::min(canvas.height, y0 + h);
    for (int y = ya; y < yb; ++y) {
        for (int x = xa; x < xb; ++x) {
            std::uint8_t* dst = canvas.at(x, y);
            dst[0] = color[0];
            dst[1] = color[1];
            dst[2] = color[2];
        }
    }
}

std::array<std::uint8_t, 3> mean_color(const Frame& frame) {
    double sum[3] = {0, 0, 0};
    const std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
    for (std::size_t i = 0; i < n; ++i) {
        sum[0] += frame.pixels[3 * i + 0];
        sum[1] += frame.pixels[3 * i + 1];
        sum[2] += frame.pixels[3 * i + 2];
    }
    return {static_cast<std::uint8_t>(std::lround(sum[0] / n)),
            static_cast<std::uint8_t>(std::lround(sum[1] / n)),
            static_cast<std::uint8_t>(std::lround(sum[2] / n))};
}

}  // namespace

Frame value_noise_frame(int width, int height, double cell, std::uint64_t seed) {
    if (width < 1 || height < 1 || cell <= 0) {
        throw std::invalid_argument("value_noise_frame: invalid dimensions");
    }
    const int gx = static_cast<int>((width - 1) / cell) + 2;
    const int gy = static_cast<int>((height - 1) / cell) + 2;
    std::mt19937_64 rng(seed);
    std::vector<double> lattice(static_cast<std::size_t>(gx) * gy * 3);
    for (double& v : lattice) {
        v = static_cast<double>(rng() >> 11) * (255.0 / 9007199254740992.0);
    }
    auto at = [&](int i, int j, int ch) {
        return lattice[(static_cast<std::size_t>(j) * gx + i) * 3 + ch];
    };

    Frame frame;
    frame.width = width;
    frame.height = height;
    frame.pixels.resize(static_cast<std::size_t>(width) * height * 3);
    for (int y = 0; y < height; ++y) {
        const double v = y / cell;
        const int j0 = static_cast<int>(v);
        const double fy = v - j0;
        for (int x = 0; x < width; ++x) {
            const double u = x / cell;
            const int i0 = static_cast<int>(u);
            const double fx = u - i0;
            std::uint8_t* dst = frame.at(x, y);
            for (int ch = 0; ch < 3; ++ch) {
                const double top = at(i0, j0, ch) * (1 - fx) + at(i0 + 1, j0, ch) * fx;
                const double bot = at(i0, j0 + 1, ch) * (1 - fx) + at(i0 + 1, j0 + 1, ch) * fx;
                const double val = top * (1 - fy) + bot * fy;
                dst[ch] = static_cast<std::uint8_t>(std::lround(std::clamp(val, 0.0, 255.0)));
            }
        }
    }
    return frame;
}

SynthResult synth_generate(const SynthParams& params, const std::filesystem::path& out_dir) {
    if (params.width < 1 || params.height < 1 || params.frames < 1) {
        throw std::invalid_argument("synth_generate: invalid frame geometry");
    }
    if (params.target_w < 1 || params.target_h < 1 || params.target_w > params.width ||
        params.target_h > params.height) {
        throw std::invalid_argument("synth_generate: target does not fit the frame");
    }
    if (params.distractors < 0) throw std::invalid_argument("synth_generate: negative distractor count");

    const std::array<double, 2> start = params.start.value_or(std::array<double, 2>{
        params.width / 2.0 - params.vel_x * (params.frames - 1) / 2.0,
        params.height / 2.0 - params.vel_y * (params.frames - 1) / 2.0});

    std::vector<Placement> places(params.frames);
    SynthResult result;
    result.start_center = start;
    result.gt.reserve(params.frames);
    for (int t = 0; t < params.frames; ++t) {
        const double cx = start[0] + params.vel_x * t;
        const double cy = start[1] + params.vel_y * t;
        const int x0 = static_cast<int>(std::lround(cx - params.target_w / 2.0));
        const int y0 = static_cast<int>(std::lround(cy - params.target_h / 2.0));
        if (x0 < 0 || y0 < 0 || x0 + params.target_w > params.width ||
            y0 + params.target_h > params.height) {
            throw std::runtime_error("synth_generate: target leaves the frame at frame " +
                                     std::to_string(t));
        }
        places[t] = {x0, y0};
        result.gt.push_back({t, x0 + params.target_w / 2.0, y0 + params.target_h / 2.0,
                             static_cast<double>(params.target_w),
                             static_cast<double>(params.target_h)});
    }

    // The background varies on a much coarser scale than the target so the
    // two are texturally distinct: target patches carry fine structure while
    // background patches are locally smooth.
    std::mt19937_64 seeds(params.seed);
    const std::uint64_t background_seed = seeds();
    const std::uint64_t target_seed = seeds();
    const Frame background = value_noise_frame(params.width, params.height, 32.0, background_seed);
    const Frame target = value_noise_frame(params.target_w, params.target_h, 4.0, target_seed);
    const std::array<std::uint8_t, 3> distractor_color = mean_color(target);

    // Distractor i crosses the target's path at an evenly spaced time,
    // sweeping vertically through the exact target position (and behind it).
    struct Distractor {
        double crossing_time;
        double cx;
        double cy0;
        double vy;
    };
    std::vector<Distractor> distractors;
    for (int i = 0; i < params.distractors; ++i) {
        const double tc = (i + 1) * (params.frames - 1) / (params.distractors + 1.0);
        const int ti = std::clamp(static_cast<int>(std::lround(tc)), 0, params.frames - 1);
        const double dir = i % 2 == 0 ? 1.0 : -1.0;
        distractors.push_back({tc, result.gt[ti].cx, result.gt[ti].cy, dir * 4.0});
    }

    std::filesystem::create_directories(out_dir);
    for (int t = 0; t < params.frames; ++t) {
        Frame frame = background;
        for (const Distractor& d : distractors) {
            const double cy = d.cy0 + d.vy * (t - d.crossing_time);
            const int x0 = static_cast<int>(std::lround(d.cx - params.target_w / 2.0));
            const int y0 = static_cast<int>(std::lround(cy - params.target_h / 2.0));
            fill_rect(frame, x0, y0, params.target_w, params.target_h, distractor_color);
        }
        paste(frame, target, places[t].x, places[t].y);
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04d.ppm", t);
        save_ppm(frame, out_dir / name);
    }
    return result;
}

}  // namespace otc
