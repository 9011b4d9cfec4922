#include "otc/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "otc/kernels.hpp"

namespace otc {

namespace {

double clamp_axis(double center, double extent, int frame_extent) {
    if (extent >= frame_extent) return frame_extent / 2.0;
    return std::clamp(center, extent / 2.0, frame_extent - extent / 2.0);
}

std::array<double, 2> clamp_center(const std::array<double, 2>& y, const TargetModel& model,
                                   const Frame& frame) {
    return {clamp_axis(y[0], model.box_w, frame.width), clamp_axis(y[1], model.box_h, frame.height)};
}

struct Candidate {
    std::vector<std::array<double, 2>> centers;
    std::vector<std::uint32_t> words;
    HistogramPDF pdf;
};

std::optional<Candidate> evaluate_candidate(const TargetModel& model, const Frame& frame,
                                            const GrayFrame& gray, const std::array<double, 2>& y) {
    const BBox box{y[0], y[1], model.box_w, model.box_h};
    const std::vector<PatchSample> patches = sample_patches(frame, gray, box, model.grid);
    if (patches.empty()) return std::nullopt;
    Candidate cand;
    cand.centers.reserve(patches.size());
    cand.words.reserve(patches.size());
    for (const PatchSample& patch : patches) {
        cand.centers.push_back(patch.center);
        const std::vector<double> f = describe_patch(patch, model.mode);
        cand.words.push_back(quantize(model.codebook, f));
    }
    cand.pdf = encode_histogram(model.codebook.k, cand.words, cand.centers, box);
    return cand;
}

}  // namespace

TargetModel build_target_model(const Frame& frame, const BBox& init_box, const TrackConfig& config) {
    if (config.patch_size < 3 || config.patch_size % 2 == 0 || config.stride < 1) {
        throw std::invalid_argument("build_target_model: invalid grid configuration");
    }
    TargetModel model;
    model.grid = {config.patch_size, config.stride};
    model.mode = config.mode;
    model.box_w = init_box.w;
    model.box_h = init_box.h;

    const GrayFrame gray = to_gray(frame);
    const std::vector<PatchSample> patches = sample_patches(frame, gray, init_box, model.grid);
    if (patches.empty()) {
        throw std::runtime_error("target too small for patch size " + std::to_string(config.patch_size));
    }
    std::vector<std::vector<double>> descriptors;
    std::vector<std::array<double, 2>> centers;
    descriptors.reserve(patches.size());
    centers.reserve(patches.size());
    for (const PatchSample& patch : patches) {
        descriptors.push_back(describe_patch(patch, model.mode));
        centers.push_back(patch.center);
    }
    KMeansResult km = kmeans_fit(descriptors, config.k, config.seed);
    model.target_pdf = encode_histogram(km.codebook.k, km.assignment, centers, init_box);
    model.codebook = std::move(km.codebook);
    return model;
}

double bhattacharyya(const HistogramPDF& a, const HistogramPDF& b) {
    if (a.bins.size() != b.bins.size()) {
        throw std::invalid_argument("bhattacharyya: bin-count mismatch");
    }
    const double rho = kernels::bhattacharyya_sum(a.bins.data(), b.bins.data(), a.bins.size());
    return std::clamp(rho, 0.0, 1.0);
}

double bhattacharyya_distance(double rho) { return std::sqrt(1.0 - std::clamp(rho, 0.0, 1.0)); }

std::vector<double> compute_weights(const HistogramPDF& target, const HistogramPDF& candidate,
                                    const std::vector<std::uint32_t>& words, double clamp) {
    if (target.bins.size() != candidate.bins.size()) {
        throw std::invalid_argument("compute_weights: bin-count mismatch");
    }
    std::vector<double> weights(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
        const std::uint32_t u = words[i];
        if (u >= target.bins.size()) throw std::invalid_argument("compute_weights: word id out of range");
        const double target_mass = target.bins[u];
        weights[i] =
            target_mass > 0 ? std::sqrt(target_mass / std::max(candidate.bins[u], clamp)) : 0.0;
    }
    return weights;
}

std::optional<std::array<double, 2>> mean_shift_vector(
    const std::vector<std::array<double, 2>>& centers, const std::vector<double>& weights,
    const std::array<double, 2>& y0, double w, double h) {
    if (centers.size() != weights.size()) {
        throw std::invalid_argument("mean_shift_vector: centers/weights size mismatch");
    }
    const double hx = w / 2.0;
    const double hy = h / 2.0;
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double rx = (centers[i][0] - y0[0]) / hx;
        const double ry = (centers[i][1] - y0[1]) / hy;
        if (rx * rx + ry * ry >= 1.0) continue;
        sw += weights[i];
        sx += weights[i] * centers[i][0];
        sy += weights[i] * centers[i][1];
    }
    if (sw <= 0.0) return std::nullopt;
    return std::array<double, 2>{sx / sw - y0[0], sy / sw - y0[1]};
}

FrameResult track_frame(const TargetModel& model, const Frame& frame,
                        const std::array<double, 2>& y_prev, const TrackConfig& config) {
    const GrayFrame gray = to_gray(frame);
    std::array<double, 2> y = clamp_center(y_prev, model, frame);

    FrameResult result;
    result.center = y;
    std::array<double, 2> evaluated_at{};
    bool have_eval = false;

    for (int it = 1; it <= config.max_iters; ++it) {
        result.iterations = it;
        const std::optional<Candidate> cand = evaluate_candidate(model, frame, gray, y);
        if (!cand) {
            if (it == 1) result.lost = true;
            break;
        }
        evaluated_at = y;
        have_eval = true;
        const double rho = bhattacharyya(model.target_pdf, cand->pdf);
        result.rho_final = rho;
        if (it == 1) result.rho_initial = rho;

        const std::vector<double> weights =
            compute_weights(model.target_pdf, cand->pdf, cand->words, config.clamp);
        const std::optional<std::array<double, 2>> shift =
            mean_shift_vector(cand->centers, weights, y, model.box_w, model.box_h);
        if (!shift) {
            if (it == 1 && rho == 0.0) result.lost = true;
            break;
        }
        y = clamp_center({y[0] + (*shift)[0], y[1] + (*shift)[1]}, model, frame);
        result.center = y;
        if (std::hypot((*shift)[0], (*shift)[1]) < config.epsilon) {
            result.converged = true;
            break;
        }
    }

    if (!result.lost && (!have_eval || y != evaluated_at)) {
        const std::optional<Candidate> final_cand = evaluate_candidate(model, frame, gray, y);
        if (final_cand) result.rho_final = bhattacharyya(model.target_pdf, final_cand->pdf);
    }
    return result;
}

std::vector<FrameResult> track_sequence(const TargetModel& model, const std::vector<Frame>& frames,
                                        const std::array<double, 2>& init_center,
                                        const TrackConfig& config) {
    if (frames.empty()) throw std::invalid_argument("track_sequence: no frames");
    std::vector<FrameResult> results;
    results.reserve(frames.size());
    std::array<double, 2> y = init_center;
    for (const Frame& frame : frames) {
        FrameResult r = track_frame(model, frame, y, config);
        y = r.center;
        results.push_back(r);
    }
    return results;
}

}  // namespace otc
