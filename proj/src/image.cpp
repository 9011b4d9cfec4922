#include "otc/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "otc/kernels.hpp"

namespace otc {

namespace {

constexpr double kEdgeEps = 1e-9;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& cause) {
    throw std::runtime_error(path.string() + ": " + cause);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "unreadable file");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!in.good() && !in.eof()) fail(path, "read error");
    return data;
}

void write_file(const std::filesystem::path& path, const void* data, std::size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(path, "cannot open for writing");
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out.good()) fail(path, "write error");
}

// Skips whitespace and '#' comments, then parses a nonnegative decimal field.
long parse_pnm_int(const std::string& data, std::size_t& pos, const std::filesystem::path& path,
                   const char* what) {
    while (pos < data.size()) {
        unsigned char c = static_cast<unsigned char>(data[pos]);
        if (c == '#') {
            while (pos < data.size() && data[pos] != '\n') ++pos;
        } else if (std::isspace(c)) {
            ++pos;
        } else {
            break;
        }
    }
    if (pos >= data.size() || !std::isdigit(static_cast<unsigned char>(data[pos]))) {
        fail(path, std::string("corrupt header: missing ") + what);
    }
    long value = 0;
    while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
        value = value * 10 + (data[pos] - '0');
        if (value > 1'000'000'000L) fail(path, std::string("corrupt header: oversized ") + what);
        ++pos;
    }
    return value;
}

void check_dimensions(const std::filesystem::path& path, long w, long h) {
    if (w < 1 || h < 1) fail(path, "corrupt header: nonpositive dimensions");
    if (w * h > 100'000'000L) fail(path, "corrupt header: image too large");
}

}  // namespace

Frame load_ppm(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    if (data.size() < 2 || data[0] != 'P' || data[1] != '6') {
        fail(path, "unsupported format: expected P6 magic");
    }
    std::size_t pos = 2;
    const long w = parse_pnm_int(data, pos, path, "width");
    const long h = parse_pnm_int(data, pos, path, "height");
    const long maxval = parse_pnm_int(data, pos, path, "maxval");
    check_dimensions(path, w, h);
    if (maxval != 255) fail(path, "unsupported format: maxval " + std::to_string(maxval));
    if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos]))) {
        fail(path, "corrupt header: missing separator after maxval");
    }
    ++pos;
    const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
    if (data.size() - pos < need) {
        fail(path, "corrupt payload: expected " + std::to_string(need) + " bytes, got " +
                       std::to_string(data.size() - pos));
    }
    Frame frame;
    frame.width = static_cast<int>(w);
    frame.height = static_cast<int>(h);
    frame.pixels.assign(data.begin() + static_cast<std::ptrdiff_t>(pos),
                        data.begin() + static_cast<std::ptrdiff_t>(pos + need));
    return frame;
}

void save_ppm(const Frame& frame, const std::filesystem::path& path) {
    if (frame.width < 1 || frame.height < 1 ||
        frame.pixels.size() != static_cast<std::size_t>(frame.width) * frame.height * 3) {
        fail(path, "invalid frame");
    }
    char header[64];
    const int len = std::snprintf(header, sizeof(header), "P6\n%d %d\n255\n", frame.width, frame.height);
    std::string out(header, static_cast<std::size_t>(len));
    out.append(reinterpret_cast<const char*>(frame.pixels.data()), frame.pixels.size());
    write_file(path, out.data(), out.size());
}

Frame load_frame(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".ppm") return load_ppm(path);
    if (ext == ".png") return load_png(path);
    fail(path, "unsupported format: extension '" + ext + "'");
}

void save_frame(const Frame& frame, const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".ppm") return save_ppm(frame, path);
    if (ext == ".png") return save_png(frame, path);
    fail(path, "unsupported format: extension '" + ext + "'");
}

GrayFrame to_gray(const Frame& frame) {
    GrayFrame gray;
    gray.width = frame.width;
    gray.height = frame.height;
    gray.luma.resize(static_cast<std::size_t>(frame.width) * frame.height);
    kernels::luma_bt601(frame.pixels.data(), gray.luma.data(), gray.luma.size());
    return gray;
}

PixelSpan box_pixel_span(double center, double extent, int frame_extent) {
    // Sampling snaps the center to the center of the pixel containing it, so
    // the pixel window is invariant under sub-pixel moves: a fractional center
    // must not flip the lattice size or anchor between iterations.
    const double snapped = std::floor(center) + 0.5;
    PixelSpan span;
    span.lo = std::max(0, static_cast<int>(std::ceil(snapped - extent / 2.0 - kEdgeEps)));
    span.hi = std::min(frame_extent - 1,
                       static_cast<int>(std::floor(snapped + extent / 2.0 + kEdgeEps)) - 1);
    return span;
}

std::vector<std::array<int, 2>> patch_center_pixels(const BBox& box, const GridSpec& grid,
                                                    int frame_w, int frame_h) {
    std::vector<std::array<int, 2>> centers;
    const int r = (grid.patch_size - 1) / 2;
    const PixelSpan sx = box_pixel_span(box.cx, box.w, frame_w);
    const PixelSpan sy = box_pixel_span(box.cy, box.h, frame_h);
    if (sx.extent() < grid.patch_size || sy.extent() < grid.patch_size) return centers;
    for (int y = sy.lo + r; y <= sy.hi - r; y += grid.stride) {
        for (int x = sx.lo + r; x <= sx.hi - r; x += grid.stride) {
            centers.push_back({x, y});
        }
    }
    return centers;
}

std::vector<PatchSample> sample_patches(const Frame& frame, const GrayFrame& gray,
                                        const BBox& box, const GridSpec& grid) {
    if (frame.width != gray.width || frame.height != gray.height) {
        throw std::invalid_argument("sample_patches: frame and gray dimensions differ");
    }
    const int n = grid.patch_size;
    const int r = (n - 1) / 2;
    std::vector<PatchSample> patches;
    for (const auto& [px, py] : patch_center_pixels(box, grid, frame.width, frame.height)) {
        PatchSample patch;
        patch.size = n;
        patch.center = {px + 0.5, py + 0.5};
        patch.gray.reserve(static_cast<std::size_t>(n) * n);
        patch.rgb.reserve(static_cast<std::size_t>(n) * n);
        for (int y = py - r; y <= py + r; ++y) {
            for (int x = px - r; x <= px + r; ++x) {
                patch.gray.push_back(gray.at(x, y));
                const std::uint8_t* p = frame.at(x, y);
                patch.rgb.push_back({static_cast<double>(p[0]), static_cast<double>(p[1]),
                                     static_cast<double>(p[2])});
            }
        }
        patches.push_back(std::move(patch));
    }
    return patches;
}

Frame draw_bbox(const Frame& frame, const BBox& box, const std::array<std::uint8_t, 3>& color) {
    Frame out = frame;
    const long wr = std::max(1L, std::lround(box.w));
    const long hr = std::max(1L, std::lround(box.h));
    const long x0 = static_cast<long>(std::floor(box.cx - box.w / 2.0 + 0.5));
    const long y0 = static_cast<long>(std::floor(box.cy - box.h / 2.0 + 0.5));
    const long x1 = x0 + wr - 1;
    const long y1 = y0 + hr - 1;
    auto paint = [&](long x, long y) {
        if (x < 0 || y < 0 || x >= frame.width || y >= frame.height) return;
        std::uint8_t* p = out.at(static_cast<int>(x), static_cast<int>(y));
        p[0] = color[0];
        p[1] = color[1];
        p[2] = color[2];
    };
    for (long x = x0; x <= x1; ++x) {
        paint(x, y0);
        if (y1 != y0) paint(x, y1);
    }
    for (long y = y0 + 1; y < y1; ++y) {
        paint(x0, y);
        if (x1 != x0) paint(x1, y);
    }
    return out;
}

std::vector<std::filesystem::path> list_sequence_frames(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) fail(dir, "no such directory");
    struct Entry {
        unsigned long long index;
        std::string name;
        fs::path path;
    };
    std::vector<Entry> entries;
    for (const auto& item : fs::directory_iterator(dir)) {
        if (!item.is_regular_file()) continue;
        std::string ext = item.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext != ".ppm" && ext != ".png") continue;
        const std::string stem = item.path().stem().string();
        std::size_t digits = 0;
        while (digits < stem.size() &&
               std::isdigit(static_cast<unsigned char>(stem[stem.size() - 1 - digits]))) {
            ++digits;
        }
        unsigned long long index = ~0ULL;
        if (digits > 0) {
            index = std::stoull(stem.substr(stem.size() - std::min<std::size_t>(digits, 18)));
        }
        entries.push_back({index, item.path().filename().string(), item.path()});
    }
    if (entries.empty()) fail(dir, "no frames found (expected .ppm or .png files)");
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.index != b.index ? a.index < b.index : a.name < b.name;
    });
    std::vector<fs::path> paths;
    paths.reserve(entries.size());
    for (auto& e : entries) paths.push_back(std::move(e.path));
    return paths;
}

}  // namespace otc
