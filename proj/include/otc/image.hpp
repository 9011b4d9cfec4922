#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace otc {

struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major RGB triples

    const std::uint8_t* at(int x, int y) const {
        return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }
    std::uint8_t* at(int x, int y) {
        return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }
};

struct GrayFrame {
    int width = 0;
    int height = 0;
    std::vector<double> luma;  // row-major, real values in [0, 255]

    double at(int x, int y) const { return luma[static_cast<std::size_t>(y) * width + x]; }
};

// Continuous coordinates: pixel (i, j) covers [i, i+1) x [j, j+1), so a box
// spanning pixels a..b has center (a + b + 1) / 2 and extent b - a + 1.
struct BBox {
    double cx = 0;
    double cy = 0;
    double w = 0;
    double h = 0;
};

struct GridSpec {
    int patch_size = 13;  // odd, >= 3
    int stride = 3;       // >= 1
};

struct PatchSample {
    int size = 0;
    std::array<double, 2> center{};          // continuous coords of the center pixel
    std::vector<double> gray;                // size*size luma values
    std::vector<std::array<double, 3>> rgb;  // size*size RGB values
};

// Inclusive pixel index range; empty when lo > hi.
struct PixelSpan {
    int lo = 0;
    int hi = -1;
    int extent() const { return hi >= lo ? hi - lo + 1 : 0; }
};

Frame load_ppm(const std::filesystem::path& path);
void save_ppm(const Frame& frame, const std::filesystem::path& path);

// 8-bit RGB or RGBA (alpha discarded), no interlace. `filter` selects the
// per-row filter type (0..4) used when encoding.
Frame load_png(const std::filesystem::path& path);
void save_png(const Frame& frame, const std::filesystem::path& path, int filter = 0);

// Dispatch on file extension (.ppm / .png).
Frame load_frame(const std::filesystem::path& path);
void save_frame(const Frame& frame, const std::filesystem::path& path);

GrayFrame to_gray(const Frame& frame);

// Pixels whose full extent lies inside both the box and the frame. The center
// is snapped to its pixel's center first, so all sub-pixel positions within
// one pixel share a single window (callers keep the fractional center).
PixelSpan box_pixel_span(double center, double extent, int frame_extent);

// Integer center pixels of all patches that fit inside box and frame,
// row-major (y outer, x inner), anchored at the top-left valid center.
std::vector<std::array<int, 2>> patch_center_pixels(const BBox& box, const GridSpec& grid,
                                                    int frame_w, int frame_h);

std::vector<PatchSample> sample_patches(const Frame& frame, const GrayFrame& gray,
                                        const BBox& box, const GridSpec& grid);

// Copy of `frame` with a 1-pixel rectangle outline of rounded extent, clipped
// to the frame bounds.
Frame draw_bbox(const Frame& frame, const BBox& box, const std::array<std::uint8_t, 3>& color);

// Image files in `dir` sorted by trailing numeric index (then by name).
std::vector<std::filesystem::path> list_sequence_frames(const std::filesystem::path& dir);

}  // namespace otc
