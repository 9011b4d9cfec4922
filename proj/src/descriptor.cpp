#include "otc/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "otc/kernels.hpp"

namespace otc {

double orientation_angle(int j) { return j * (std::numbers::pi / kNumOrientations); }

StripPartition strip_partition(int size, double angle) {
    if (size < 3 || size % 2 == 0) {
        throw std::invalid_argument("strip_partition: patch size must be odd and >= 3");
    }
    const int n = size;
    const std::size_t total = static_cast<std::size_t>(n) * n;
    StripPartition part;
    part.size = n;
    part.angle = angle;
    part.strip_of.resize(total);
    part.counts.assign(n, 0);

    const double c = (n - 1) / 2.0;
    const double s = std::sin(angle);
    const double co = std::cos(angle);
    std::vector<double> proj(total);
    double dmin = std::numeric_limits<double>::infinity();
    double dmax = -std::numeric_limits<double>::infinity();
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double d = -s * (x - c) + co * (y - c);
            proj[static_cast<std::size_t>(y) * n + x] = d;
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
    }
    const double range = (dmax - dmin) * (1.0 + 1e-9);
    for (std::size_t p = 0; p < total; ++p) {
        int strip = range > 0 ? static_cast<int>(n * (proj[p] - dmin) / range) : 0;
        strip = std::clamp(strip, 0, n - 1);
        part.strip_of[p] = strip;
        ++part.counts[strip];
    }

    // Defensive rebalance: unreachable at the 8 canonical orientations, kept
    // so the N-point curve shape survives arbitrary angles.
    for (int i = 0; i < n; ++i) {
        if (part.counts[i] > 0) continue;
        const double target = dmin + (i + 0.5) * (dmax - dmin) / n;
        std::size_t donor = total;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < total; ++p) {
            if (part.counts[part.strip_of[p]] < 2) continue;
            const double dist = std::abs(proj[p] - target);
            if (dist < best) {
                best = dist;
                donor = p;
            }
        }
        if (donor == total) throw std::logic_error("strip_partition: cannot repair empty strip");
        --part.counts[part.strip_of[donor]];
        part.strip_of[donor] = i;
        ++part.counts[i];
        part.repaired = true;
    }
    return part;
}

const std::array<StripPartition, kNumOrientations>& strip_partitions(int size) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<std::array<StripPartition, kNumOrientations>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[size];
    if (!slot) {
        slot = std::make_unique<std::array<StripPartition, kNumOrientations>>();
        for (int j = 0; j < kNumOrientations; ++j) {
            (*slot)[j] = strip_partition(size, orientation_angle(j));
        }
    }
    return *slot;
}

CurveSet compute_curves(const PatchSample& patch,
                        const std::array<StripPartition, kNumOrientations>& partitions) {
    const int n = patch.size;
    const std::size_t total = static_cast<std::size_t>(n) * n;
    if (patch.gray.size() != total || patch.rgb.size() != total) {
        throw std::invalid_argument("compute_curves: patch pixel count does not match its size");
    }
    CurveSet curves;
    curves.size = n;
    for (int j = 0; j < kNumOrientations; ++j) {
        const StripPartition& part = partitions[j];
        if (part.size != n) throw std::invalid_argument("compute_curves: partition size mismatch");
        // Mean anchored at each strip's first value so constant strips come
        // back exactly, which is what collapses flat patches to the canonical
        // descriptor.
        std::vector<double> first(n, 0.0), acc(n, 0.0);
        std::vector<std::array<double, 3>> first_rgb(n, {0, 0, 0}), acc_rgb(n, {0, 0, 0});
        std::vector<char> seen(n, 0);
        for (std::size_t p = 0; p < total; ++p) {
            const int strip = part.strip_of[p];
            if (!seen[strip]) {
                seen[strip] = 1;
                first[strip] = patch.gray[p];
                first_rgb[strip] = patch.rgb[p];
            } else {
                acc[strip] += patch.gray[p] - first[strip];
                for (int ch = 0; ch < 3; ++ch) acc_rgb[strip][ch] += patch.rgb[p][ch] - first_rgb[strip][ch];
            }
        }
        curves.gray[j].resize(n);
        curves.rgb[j].resize(n);
        for (int i = 0; i < n; ++i) {
            const double m = part.counts[i];
            curves.gray[j][i] = first[i] + acc[i] / m;
            for (int ch = 0; ch < 3; ++ch) curves.rgb[j][i][ch] = first_rgb[i][ch] + acc_rgb[i][ch] / m;
        }
    }
    return curves;
}

std::vector<double> curve_gradient(const std::vector<double>& v) {
    if (v.size() < 2) throw std::invalid_argument("curve_gradient: need at least 2 points");
    std::vector<double> out(v.size() - 1);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) out[i] = v[i + 1] - v[i];
    return out;
}

std::vector<double> curve_curvature(const std::vector<double>& gradient) {
    return curve_gradient(gradient);
}

std::vector<double> rgb_gradient(const std::vector<std::array<double, 3>>& V,
                                 const std::vector<double>& gray_gradient) {
    if (V.size() < 2 || gray_gradient.size() != V.size() - 1) {
        throw std::invalid_argument("rgb_gradient: length mismatch");
    }
    std::vector<double> out(gray_gradient.size());
    for (std::size_t i = 0; i + 1 < V.size(); ++i) {
        const double dr = V[i + 1][0] - V[i][0];
        const double dg = V[i + 1][1] - V[i][1];
        const double db = V[i + 1][2] - V[i][2];
        const double sign = gray_gradient[i] > 0 ? 1.0 : (gray_gradient[i] < 0 ? -1.0 : 0.0);
        out[i] = sign * std::sqrt(dr * dr + dg * dg + db * db);
    }
    return out;
}

std::size_t descriptor_length(int size) {
    return 1 + static_cast<std::size_t>(kNumOrientations) * (2 * static_cast<std::size_t>(size) - 3);
}

std::vector<double> assemble_descriptor(const CurveSet& curves, DescriptorMode mode) {
    const int n = curves.size;
    if (n < 3) throw std::invalid_argument("assemble_descriptor: invalid curve set");
    std::vector<double> f;
    f.reserve(descriptor_length(n));
    f.push_back(kHBin);
    for (int j = 0; j < kNumOrientations; ++j) {
        const std::vector<double> gray_grad = curve_gradient(curves.gray[j]);
        const std::vector<double> grad =
            mode == DescriptorMode::rgb ? rgb_gradient(curves.rgb[j], gray_grad) : gray_grad;
        const std::vector<double> curv = curve_curvature(grad);
        f.insert(f.end(), grad.begin(), grad.end());
        f.insert(f.end(), curv.begin(), curv.end());
    }
    const double ss = kernels::squared_l2(f.data() + 1, f.size() - 1);
    if (ss == 0.0) {
        std::fill(f.begin(), f.end(), 0.0);
        f[0] = 1.0;
        return f;
    }
    kernels::scale(f.data(), f.size(), 1.0 / std::sqrt(kHBin * kHBin + ss));
    return f;
}

std::vector<double> describe_patch(const PatchSample& patch, DescriptorMode mode) {
    return assemble_descriptor(compute_curves(patch, strip_partitions(patch.size)), mode);
}

}  // namespace otc
