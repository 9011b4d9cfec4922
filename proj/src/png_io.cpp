#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "otc/image.hpp"

namespace otc {

namespace {

constexpr unsigned char kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& cause) {
    throw std::runtime_error(path.string() + ": " + cause);
}

std::uint32_t read_u32(const unsigned char* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v >> 24));
    out.push_back(static_cast<unsigned char>(v >> 16));
    out.push_back(static_cast<unsigned char>(v >> 8));
    out.push_back(static_cast<unsigned char>(v));
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a);
    const int pb = std::abs(p - b);
    const int pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

// In-place reconstruction of one filtered row. `prev` is the reconstructed
// previous row (null for the first row).
void unfilter_row(int filter, unsigned char* row, const unsigned char* prev, std::size_t len,
                  std::size_t bpp, const std::filesystem::path& path) {
    switch (filter) {
        case 0:
            break;
        case 1:
            for (std::size_t i = bpp; i < len; ++i) row[i] = static_cast<unsigned char>(row[i] + row[i - bpp]);
            break;
        case 2:
            if (prev) {
                for (std::size_t i = 0; i < len; ++i) row[i] = static_cast<unsigned char>(row[i] + prev[i]);
            }
            break;
        case 3:
            for (std::size_t i = 0; i < len; ++i) {
                const int left = i >= bpp ? row[i - bpp] : 0;
                const int up = prev ? prev[i] : 0;
                row[i] = static_cast<unsigned char>(row[i] + (left + up) / 2);
            }
            break;
        case 4:
            for (std::size_t i = 0; i < len; ++i) {
                const int left = i >= bpp ? row[i - bpp] : 0;
                const int up = prev ? prev[i] : 0;
                const int ul = (prev && i >= bpp) ? prev[i - bpp] : 0;
                row[i] = static_cast<unsigned char>(row[i] + paeth(left, up, ul));
            }
            break;
        default:
            fail(path, "corrupt payload: unknown filter type " + std::to_string(filter));
    }
}

void filter_row(int filter, const unsigned char* row, const unsigned char* prev, std::size_t len,
                std::size_t bpp, unsigned char* out) {
    for (std::size_t i = 0; i < len; ++i) {
        const int raw = row[i];
        const int left = i >= bpp ? row[i - bpp] : 0;
        const int up = prev ? prev[i] : 0;
        const int ul = (prev && i >= bpp) ? prev[i - bpp] : 0;
        int pred = 0;
        switch (filter) {
            case 1: pred = left; break;
            case 2: pred = up; break;
            case 3: pred = (left + up) / 2; break;
            case 4: pred = paeth(left, up, ul); break;
            default: break;
        }
        out[i] = static_cast<unsigned char>(raw - pred);
    }
}

}  // namespace

Frame load_png(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "unreadable file");
    std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (data.size() < 8 || std::memcmp(data.data(), kSignature, 8) != 0) {
        fail(path, "unsupported format: not a PNG file");
    }

    std::uint32_t width = 0, height = 0;
    int color_type = -1;
    std::vector<unsigned char> idat;
    bool saw_ihdr = false, saw_iend = false;

    std::size_t pos = 8;
    while (pos + 12 <= data.size() && !saw_iend) {
        const std::uint32_t len = read_u32(&data[pos]);
        if (pos + 12 + static_cast<std::size_t>(len) > data.size()) {
            fail(path, "corrupt payload: truncated chunk");
        }
        const char* type = reinterpret_cast<const char*>(&data[pos + 4]);
        const unsigned char* body = &data[pos + 8];
        const std::uint32_t crc = read_u32(&data[pos + 8 + len]);
        const std::uint32_t want =
            static_cast<std::uint32_t>(crc32(crc32(0L, Z_NULL, 0), &data[pos + 4], len + 4));
        if (crc != want) fail(path, "corrupt payload: chunk CRC mismatch");

        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) fail(path, "corrupt header: bad IHDR length");
            width = read_u32(body);
            height = read_u32(body + 4);
            const int bit_depth = body[8];
            color_type = body[9];
            if (bit_depth != 8) fail(path, "unsupported format: bit depth " + std::to_string(bit_depth));
            if (color_type != 2 && color_type != 6) {
                fail(path, "unsupported format: color type " + std::to_string(color_type));
            }
            if (body[10] != 0 || body[11] != 0) fail(path, "unsupported format: nonzero compression/filter method");
            if (body[12] != 0) fail(path, "unsupported format: interlaced image");
            if (width == 0 || height == 0 || static_cast<std::uint64_t>(width) * height > 100'000'000ULL) {
                fail(path, "corrupt header: bad dimensions");
            }
            saw_ihdr = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            if (!saw_ihdr) fail(path, "corrupt payload: IDAT before IHDR");
            idat.insert(idat.end(), body, body + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            saw_iend = true;
        }
        pos += 12 + len;
    }
    if (!saw_ihdr) fail(path, "corrupt header: missing IHDR");
    if (!saw_iend) fail(path, "corrupt payload: missing IEND");
    if (idat.empty()) fail(path, "corrupt payload: missing IDAT");

    const std::size_t bpp = color_type == 6 ? 4 : 3;
    const std::size_t row_len = static_cast<std::size_t>(width) * bpp;
    std::vector<unsigned char> raw(static_cast<std::size_t>(height) * (row_len + 1));
    uLongf raw_len = static_cast<uLongf>(raw.size());
    const int rc = uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size()));
    if (rc != Z_OK || raw_len != raw.size()) fail(path, "corrupt payload: zlib inflate failed");

    Frame frame;
    frame.width = static_cast<int>(width);
    frame.height = static_cast<int>(height);
    frame.pixels.resize(static_cast<std::size_t>(width) * height * 3);
    const unsigned char* prev = nullptr;
    for (std::uint32_t y = 0; y < height; ++y) {
        unsigned char* row = &raw[static_cast<std::size_t>(y) * (row_len + 1)];
        unfilter_row(row[0], row + 1, prev, row_len, bpp, path);
        std::uint8_t* dst = frame.pixels.data() + static_cast<std::size_t>(y) * width * 3;
        for (std::uint32_t x = 0; x < width; ++x) {
            dst[3 * x + 0] = row[1 + bpp * x + 0];
            dst[3 * x + 1] = row[1 + bpp * x + 1];
            dst[3 * x + 2] = row[1 + bpp * x + 2];
        }
        prev = row + 1;
    }
    return frame;
}

void save_png(const Frame& frame, const std::filesystem::path& path, int filter) {
    if (frame.width < 1 || frame.height < 1 ||
        frame.pixels.size() != static_cast<std::size_t>(frame.width) * frame.height * 3) {
        fail(path, "invalid frame");
    }
    if (filter < 0 || filter > 4) fail(path, "invalid filter type " + std::to_string(filter));

    const std::size_t row_len = static_cast<std::size_t>(frame.width) * 3;
    std::vector<unsigned char> raw(static_cast<std::size_t>(frame.height) * (row_len + 1));
    const unsigned char* prev = nullptr;
    for (int y = 0; y < frame.height; ++y) {
        unsigned char* out = &raw[static_cast<std::size_t>(y) * (row_len + 1)];
        const unsigned char* row = frame.pixels.data() + static_cast<std::size_t>(y) * row_len;
        out[0] = static_cast<unsigned char>(filter);
        filter_row(filter, row, prev, row_len, 3, out + 1);
        prev = row;
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<unsigned char> compressed(bound);
    if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                  Z_DEFAULT_COMPRESSION) != Z_OK) {
        fail(path, "zlib deflate failed");
    }
    compressed.resize(bound);

    std::vector<unsigned char> out;
    out.insert(out.end(), kSignature, kSignature + 8);
    auto chunk = [&](const char* type, const std::vector<unsigned char>& body) {
        put_u32(out, static_cast<std::uint32_t>(body.size()));
        const std::size_t start = out.size();
        out.insert(out.end(), type, type + 4);
        out.insert(out.end(), body.begin(), body.end());
        const std::uint32_t crc = static_cast<std::uint32_t>(
            crc32(crc32(0L, Z_NULL, 0), &out[start], static_cast<uInt>(4 + body.size())));
        put_u32(out, crc);
    };

    std::vector<unsigned char> ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(frame.width));
    put_u32(ihdr, static_cast<std::uint32_t>(frame.height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // truecolor
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    chunk("IHDR", ihdr);
    chunk("IDAT", compressed);
    chunk("IEND", {});

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) fail(path, "cannot open for writing");
    os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!os.good()) fail(path, "write error");
}

}  // namespace otc
