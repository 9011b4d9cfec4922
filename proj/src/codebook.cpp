#include "otc/codebook.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include "otc/kernels.hpp"

namespace otc {

namespace {

std::uint32_t nearest_centroid(const Codebook& cb, const double* f, double* out_d2 = nullptr) {
    std::uint32_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::uint32_t j = 0; j < cb.k; ++j) {
        const double d2 = kernels::squared_distance(f, cb.centroid(j), cb.d);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = j;
        }
    }
    if (out_d2) *out_d2 = best_d2;
    return best;
}

std::uint32_t count_distinct(const std::vector<std::vector<double>>& features) {
    std::set<std::vector<double>> distinct(features.begin(), features.end());
    return static_cast<std::uint32_t>(distinct.size());
}

}  // namespace

KMeansResult kmeans_fit(const std::vector<std::vector<double>>& features, std::uint32_t k,
                        std::uint64_t seed) {
    const std::size_t n = features.size();
    if (n == 0) throw std::invalid_argument("kmeans_fit: empty feature set");
    if (k == 0) throw std::invalid_argument("kmeans_fit: k must be >= 1");
    const std::size_t d = features[0].size();
    if (d == 0) throw std::invalid_argument("kmeans_fit: zero-dimensional features");
    for (const auto& f : features) {
        if (f.size() != d) throw std::invalid_argument("kmeans_fit: inconsistent feature dimensions");
    }

    KMeansResult result;
    result.requested_k = k;
    k = std::min(k, count_distinct(features));

    Codebook cb;
    cb.k = k;
    cb.d = static_cast<std::uint32_t>(d);
    cb.seed = seed;
    cb.centroids.resize(static_cast<std::size_t>(k) * d);

    // Farthest-point seeding: a seeded random first pick, then repeatedly the
    // feature farthest from its nearest chosen centroid (ties to the lowest
    // index).
    std::mt19937_64 rng(seed);
    std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
    std::size_t pick = static_cast<std::size_t>(rng() % n);
    for (std::uint32_t j = 0; j < k; ++j) {
        std::copy_n(features[pick].data(), d, cb.centroids.data() + static_cast<std::size_t>(j) * d);
        if (j + 1 == k) break;
        double best = -1.0;
        std::size_t next = 0;
        for (std::size_t i = 0; i < n; ++i) {
            min_d2[i] = std::min(min_d2[i], kernels::squared_distance(features[i].data(), cb.centroid(j), d));
            if (min_d2[i] > best) {
                best = min_d2[i];
                next = i;
            }
        }
        pick = next;
    }

    std::vector<std::uint32_t> assignment(n, 0);
    std::vector<std::uint32_t> prev_assignment;
    std::vector<std::uint32_t> cluster_size(k, 0);
    for (int iter = 0; iter < 100; ++iter) {
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d2 = 0.0;
            assignment[i] = nearest_centroid(cb, features[i].data(), &d2);
            objective += d2;
        }
        result.objective_history.push_back(objective);
        result.objective = objective;
        if (assignment == prev_assignment) break;
        prev_assignment = assignment;

        std::fill(cb.centroids.begin(), cb.centroids.end(), 0.0);
        std::fill(cluster_size.begin(), cluster_size.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            kernels::accumulate(cb.centroids.data() + static_cast<std::size_t>(assignment[i]) * d,
                                features[i].data(), d);
            ++cluster_size[assignment[i]];
        }
        for (std::uint32_t j = 0; j < k; ++j) {
            if (cluster_size[j] > 0) {
                kernels::scale(cb.centroids.data() + static_cast<std::size_t>(j) * d, d,
                               1.0 / cluster_size[j]);
            }
        }
        // Empty-cluster repair: seize the feature farthest from its assigned
        // centroid. Cannot recur out of features since k <= distinct count.
        for (std::uint32_t j = 0; j < k; ++j) {
            if (cluster_size[j] > 0) continue;
            double best = -1.0;
            std::size_t far = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (cluster_size[assignment[i]] < 2) continue;
                const double d2 = kernels::squared_distance(
                    features[i].data(), cb.centroid(assignment[i]), d);
                if (d2 > best) {
                    best = d2;
                    far = i;
                }
            }
            --cluster_size[assignment[far]];
            std::copy_n(features[far].data(), d, cb.centroids.data() + static_cast<std::size_t>(j) * d);
            assignment[far] = j;
            cluster_size[j] = 1;
        }
    }

    result.codebook = std::move(cb);
    result.assignment = std::move(assignment);
    return result;
}

std::uint32_t quantize(const Codebook& codebook, const double* f, std::size_t d) {
    if (d != codebook.d || codebook.k == 0) {
        throw std::invalid_argument("quantize: descriptor dimension does not match the codebook");
    }
    return nearest_centroid(codebook, f);
}

std::uint32_t quantize(const Codebook& codebook, const std::vector<double>& f) {
    return quantize(codebook, f.data(), f.size());
}

HistogramPDF encode_histogram(std::uint32_t k, const std::vector<std::uint32_t>& words,
                              const std::vector<std::array<double, 2>>& centers, const BBox& region) {
    if (words.empty()) throw std::invalid_argument("encode_histogram: empty sample list");
    if (words.size() != centers.size()) {
        throw std::invalid_argument("encode_histogram: words/centers size mismatch");
    }
    if (region.w <= 0 || region.h <= 0) throw std::invalid_argument("encode_histogram: empty region");

    HistogramPDF pdf;
    pdf.bins.assign(k, 0.0);
    const double hx = region.w / 2.0;
    const double hy = region.h / 2.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (words[i] >= k) throw std::invalid_argument("encode_histogram: word id out of range");
        const double rx = (centers[i][0] - region.cx) / hx;
        const double ry = (centers[i][1] - region.cy) / hy;
        const double kappa = std::max(0.0, 1.0 - (rx * rx + ry * ry));
        pdf.bins[words[i]] += kappa;
        mass += kappa;
    }
    if (mass <= 0.0) {
        pdf.uniform_fallback = true;
        std::fill(pdf.bins.begin(), pdf.bins.end(), 0.0);
        for (const std::uint32_t w : words) pdf.bins[w] += 1.0;
        mass = static_cast<double>(words.size());
    }
    pdf.alpha = 1.0 / mass;
    kernels::scale(pdf.bins.data(), pdf.bins.size(), pdf.alpha);
    return pdf;
}

HistogramPDF encode_histogram(const Codebook& codebook,
                              const std::vector<std::vector<double>>& descriptors,
                              const std::vector<std::array<double, 2>>& centers, const BBox& region) {
    if (descriptors.size() != centers.size()) {
        throw std::invalid_argument("encode_histogram: descriptors/centers size mismatch");
    }
    std::vector<std::uint32_t> words;
    words.reserve(descriptors.size());
    for (const auto& f : descriptors) words.push_back(quantize(codebook, f));
    return encode_histogram(codebook.k, words, centers, region);
}

namespace {

constexpr char kMagic[4] = {'O', 'T', 'C', 'B'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "codebook persistence assumes a little-endian host");

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::filesystem::path& path) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
        throw std::runtime_error(path.string() + ": corrupt payload: truncated file");
    }
    return value;
}

}  // namespace

void save_codebook(const Codebook& codebook, const std::filesystem::path& path) {
    if (codebook.centroids.size() != static_cast<std::size_t>(codebook.k) * codebook.d) {
        throw std::invalid_argument("save_codebook: inconsistent codebook");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out.write(kMagic, 4);
    write_pod(out, kVersion);
    write_pod(out, codebook.k);
    write_pod(out, codebook.d);
    write_pod(out, codebook.seed);
    out.write(reinterpret_cast<const char*>(codebook.centroids.data()),
              static_cast<std::streamsize>(codebook.centroids.size() * sizeof(double)));
    if (!out.good()) throw std::runtime_error(path.string() + ": write error");
}

Codebook load_codebook(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path.string() + ": unreadable file");
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error(path.string() + ": unsupported format: bad magic");
    }
    const auto version = read_pod<std::uint32_t>(in, path);
    if (version != kVersion) {
        throw std::runtime_error(path.string() + ": unsupported format: version " + std::to_string(version));
    }
    Codebook cb;
    cb.k = read_pod<std::uint32_t>(in, path);
    cb.d = read_pod<std::uint32_t>(in, path);
    cb.seed = read_pod<std::uint64_t>(in, path);
    if (cb.k == 0 || cb.d == 0 || static_cast<std::uint64_t>(cb.k) * cb.d > 100'000'000ULL) {
        throw std::runtime_error(path.string() + ": corrupt header: bad k or d");
    }
    cb.centroids.resize(static_cast<std::size_t>(cb.k) * cb.d);
    if (!in.read(reinterpret_cast<char*>(cb.centroids.data()),
                 static_cast<std::streamsize>(cb.centroids.size() * sizeof(double)))) {
        throw std::runtime_error(path.string() + ": corrupt payload: truncated centroid table");
    }
    for (const double v : cb.centroids) {
        if (!std::isfinite(v)) throw std::runtime_error(path.string() + ": corrupt payload: non-finite centroid");
    }
    return cb;
}

}  // namespace otc
