#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "otc/image.hpp"

namespace otc {

struct Codebook {
    std::uint32_t k = 0;
    std::uint32_t d = 0;
    std::uint64_t seed = 0;
    std::vector<double> centroids;  // k * d, row-major

    const double* centroid(std::uint32_t i) const { return centroids.data() + static_cast<std::size_t>(i) * d; }
};

struct KMeansResult {
    Codebook codebook;
    std::vector<std::uint32_t> assignment;  // nearest-centroid id per feature
    double objective = 0.0;                 // cumulative squared error
    std::vector<double> objective_history;  // objective after each assignment pass
    std::uint32_t requested_k = 0;          // k before the distinct-vector reduction
};

// Lloyd iterations from farthest-point seeding under `seed`. k is reduced to
// the number of distinct feature vectors when it exceeds them. Deterministic
// for fixed inputs.
KMeansResult kmeans_fit(const std::vector<std::vector<double>>& features, std::uint32_t k,
                        std::uint64_t seed);

// Nearest centroid by squared euclidean distance, ties to the lowest index.
std::uint32_t quantize(const Codebook& codebook, const std::vector<double>& f);
std::uint32_t quantize(const Codebook& codebook, const double* f, std::size_t d);

struct HistogramPDF {
    std::vector<double> bins;       // k entries, nonnegative, summing to 1
    double alpha = 0.0;             // normalizer applied to the raw kernel mass
    bool uniform_fallback = false;  // all kernel weights were zero
};

// Kernel-weighted word histogram about the region center. Each sample's
// weight is max(0, 1 - r^2) with r^2 the squared offset normalized by the
// region half-extents; all-zero weights fall back to uniform ones.
HistogramPDF encode_histogram(std::uint32_t k, const std::vector<std::uint32_t>& words,
                              const std::vector<std::array<double, 2>>& centers, const BBox& region);
HistogramPDF encode_histogram(const Codebook& codebook,
                              const std::vector<std::vector<double>>& descriptors,
                              const std::vector<std::array<double, 2>>& centers, const BBox& region);

// Flat binary persistence: magic "OTCB", version u32, k u32, d u32, seed u64
// (little-endian), then k*d doubles row-major.
void save_codebook(const Codebook& codebook, const std::filesystem::path& path);
Codebook load_codebook(const std::filesystem::path& path);

}  // namespace otc
