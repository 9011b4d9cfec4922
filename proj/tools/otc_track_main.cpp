#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "otc/codebook.hpp"
#include "otc/descriptor.hpp"
#include "otc/eval.hpp"
#include "otc/image.hpp"
#include "otc/kernels.hpp"
#include "otc/synth.hpp"
#include "otc/tracker.hpp"
#include "otc/trajectory.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<double> parse_doubles(const std::string& text, std::size_t count, const char* what) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (values.size() < count) {
        std::size_t used = 0;
        values.push_back(std::stod(text.substr(pos), &used));
        pos += used;
        if (values.size() < count) {
            if (pos >= text.size() || text[pos] != ',') {
                throw std::runtime_error(std::string("expected ") + what);
            }
            ++pos;
        }
    }
    if (pos != text.size()) throw std::runtime_error(std::string("expected ") + what);
    return values;
}

otc::BBox parse_init_box(const std::string& text) {
    const auto v = parse_doubles(text, 4, "--init as CX,CY,W,H");
    if (v[2] <= 0 || v[3] <= 0) throw std::runtime_error("--init extents must be positive");
    return {v[0], v[1], v[2], v[3]};
}

std::array<int, 2> parse_size(const std::string& text, const char* what) {
    const std::size_t x = text.find('x');
    if (x == std::string::npos) throw std::runtime_error(std::string("expected ") + what + " as WxH");
    const int w = std::stoi(text.substr(0, x));
    const int h = std::stoi(text.substr(x + 1));
    if (w < 1 || h < 1) throw std::runtime_error(std::string(what) + " must be positive");
    return {w, h};
}

otc::DescriptorMode parse_mode(const std::string& text) {
    if (text == "gray") return otc::DescriptorMode::gray;
    if (text == "rgb") return otc::DescriptorMode::rgb;
    throw std::runtime_error("mode must be 'gray' or 'rgb', got '" + text + "'");
}

std::string trim(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

otc::TrackConfig apply_config_file(otc::TrackConfig cfg, const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": unreadable config file");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "max_iters") cfg.max_iters = std::stoi(value);
            else if (key == "epsilon") cfg.epsilon = std::stod(value);
            else if (key == "clamp") cfg.clamp = std::stod(value);
            else if (key == "patch_size") cfg.patch_size = std::stoi(value);
            else if (key == "stride") cfg.stride = std::stoi(value);
            else if (key == "k") cfg.k = static_cast<std::uint32_t>(std::stoul(value));
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "mode") cfg.mode = parse_mode(value);
            else throw std::runtime_error("unknown key '" + key + "'");
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

double similarity_at(const otc::TargetModel& model, const otc::Frame& frame, const otc::BBox& box) {
    const otc::GrayFrame gray = otc::to_gray(frame);
    const auto patches = otc::sample_patches(frame, gray, box, model.grid);
    if (patches.empty()) return 0.0;
    std::vector<std::uint32_t> words;
    std::vector<std::array<double, 2>> centers;
    for (const auto& patch : patches) {
        words.push_back(otc::quantize(model.codebook, otc::describe_patch(patch, model.mode)));
        centers.push_back(patch.center);
    }
    return otc::bhattacharyya(model.target_pdf,
                              otc::encode_histogram(model.codebook.k, words, centers, box));
}

int run_track(const std::string& frames_arg, const std::string& init_arg, const otc::TrackConfig& cfg,
              bool render, const std::string& out_arg, const std::string& save_codebook_arg) {
    fs::path frames_dir = fs::path(frames_arg).lexically_normal();
    if (frames_dir.filename().empty()) frames_dir = frames_dir.parent_path();
    const otc::BBox init = parse_init_box(init_arg);

    const auto paths = otc::list_sequence_frames(frames_dir);
    std::vector<otc::Frame> frames;
    frames.reserve(paths.size());
    for (const auto& p : paths) frames.push_back(otc::load_frame(p));

    const otc::TargetModel model = otc::build_target_model(frames[0], init, cfg);

    std::vector<otc::TrajectoryRow> rows;
    rows.push_back({0, init.cx, init.cy, init.w, init.h, similarity_at(model, frames[0], init), 0, 0});
    if (frames.size() > 1) {
        const std::vector<otc::Frame> rest(frames.begin() + 1, frames.end());
        const auto results = otc::track_sequence(model, rest, {init.cx, init.cy}, cfg);
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& r = results[i];
            rows.push_back({static_cast<int>(i) + 1, r.center[0], r.center[1], init.w, init.h,
                            r.rho_final, r.iterations, r.lost ? 1 : 0});
        }
    }
    otc::write_trajectory_csv(rows, out_arg);
    std::cout << "wrote " << rows.size() << " rows to " << out_arg << "\n";

    if (!save_codebook_arg.empty()) {
        otc::save_codebook(model.codebook, save_codebook_arg);
        std::cout << "wrote codebook (" << model.codebook.k << " words) to " << save_codebook_arg << "\n";
    }
    if (render) {
        const fs::path annotated = frames_dir.parent_path() / (frames_dir.filename().string() + "_annotated");
        fs::create_directories(annotated);
        for (std::size_t i = 0; i < frames.size(); ++i) {
            const auto& row = rows[i];
            const otc::Frame out =
                otc::draw_bbox(frames[i], {row.cx, row.cy, row.w, row.h}, {255, 255, 255});
            otc::save_frame(out, annotated / paths[i].filename());
        }
        std::cout << "wrote " << frames.size() << " annotated frames to " << annotated.string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dense texture-curve descriptor tracker"};
    app.require_subcommand(1);
    std::string isa;
    app.add_option("--isa", isa, "compute backend: scalar or avx2 (default: auto)");

    auto* track = app.add_subcommand("track", "track a target through an image sequence");
    std::string frames_arg, init_arg, config_arg, out_arg, save_codebook_arg, mode_arg;
    bool render = false;
    int max_iters = 0, patch_size = 0, stride = 0;
    double epsilon = 0, clamp = 0;
    std::uint64_t seed = 0;
    std::uint32_t k = 0;
    track->add_option("--frames", frames_arg, "directory of .ppm/.png frames")->required();
    track->add_option("--init", init_arg, "initial box CX,CY,W,H")->required();
    track->add_option("--config", config_arg, "key = value config file");
    track->add_flag("--render", render, "write annotated frames to a sibling directory");
    track->add_option("--out", out_arg, "output trajectory CSV")->required();
    track->add_option("--save-codebook", save_codebook_arg, "also write the fitted codebook");
    auto* o_max_iters = track->add_option("--max-iters", max_iters, "iteration cap per frame");
    auto* o_epsilon = track->add_option("--epsilon", epsilon, "convergence threshold in pixels");
    auto* o_clamp = track->add_option("--clamp", clamp, "weight-ratio denominator floor");
    auto* o_patch = track->add_option("--patch-size", patch_size, "odd patch size");
    auto* o_stride = track->add_option("--stride", stride, "grid stride");
    auto* o_k = track->add_option("--k", k, "vocabulary size");
    auto* o_seed = track->add_option("--seed", seed, "clustering seed");
    auto* o_mode = track->add_option("--mode", mode_arg, "descriptor mode: gray or rgb");

    auto* synth = app.add_subcommand("synth", "generate a synthetic sequence with ground truth");
    std::string synth_out, synth_size = "128x128", synth_target = "24x24", synth_vel = "2,0";
    std::string synth_start, synth_gt;
    int synth_frames = 60, synth_distractors = 0;
    std::uint64_t synth_seed = 0;
    synth->add_option("--out", synth_out, "output frame directory")->required();
    synth->add_option("--frames", synth_frames, "frame count");
    synth->add_option("--size", synth_size, "frame size WxH");
    synth->add_option("--target", synth_target, "target size WxH");
    synth->add_option("--vel", synth_vel, "target velocity DX,DY in pixels/frame");
    synth->add_option("--seed", synth_seed, "texture seed");
    synth->add_option("--distractors", synth_distractors, "same-color distractor crossings");
    synth->add_option("--start", synth_start, "target center CX,CY at frame 0 (default: centered path)");
    synth->add_option("--gt", synth_gt, "output ground-truth CSV")->required();

    auto* eval = app.add_subcommand("eval", "compare a trajectory against ground truth");
    std::string eval_traj, eval_gt;
    double eval_tau = 20.0;
    eval->add_option("--traj", eval_traj, "trajectory CSV")->required();
    eval->add_option("--gt", eval_gt, "ground-truth CSV")->required();
    eval->add_option("--tau", eval_tau, "success threshold in pixels");

    auto* describe = app.add_subcommand("describe", "print the curves and descriptor of one patch");
    std::string describe_patch_arg, describe_mode = "rgb";
    describe->add_option("--patch", describe_patch_arg, "square odd-sized patch image")->required();
    describe->add_option("--mode", describe_mode, "descriptor mode: gray or rgb");

    auto* codebook = app.add_subcommand("codebook", "codebook file utilities");
    codebook->require_subcommand(1);
    auto* inspect = codebook->add_subcommand("inspect", "print header fields and centroid norms");
    std::string inspect_path;
    inspect->add_option("file", inspect_path, "codebook file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (!isa.empty()) {
            if (isa == "scalar") otc::kernels::select(otc::kernels::Isa::scalar);
            else if (isa == "avx2") otc::kernels::select(otc::kernels::Isa::avx2);
            else throw std::runtime_error("unknown --isa '" + isa + "'");
        }

        if (track->parsed()) {
            otc::TrackConfig cfg;
            if (!config_arg.empty()) cfg = apply_config_file(cfg, config_arg);
            if (o_max_iters->count()) cfg.max_iters = max_iters;
            if (o_epsilon->count()) cfg.epsilon = epsilon;
            if (o_clamp->count()) cfg.clamp = clamp;
            if (o_patch->count()) cfg.patch_size = patch_size;
            if (o_stride->count()) cfg.stride = stride;
            if (o_k->count()) cfg.k = k;
            if (o_seed->count()) cfg.seed = seed;
            if (o_mode->count()) cfg.mode = parse_mode(mode_arg);
            if (cfg.max_iters < 1 || cfg.epsilon <= 0 || cfg.clamp <= 0 || cfg.stride < 1 ||
                cfg.patch_size < 3 || cfg.patch_size % 2 == 0 || cfg.k < 1) {
                throw std::runtime_error("invalid tracking configuration");
            }
            return run_track(frames_arg, init_arg, cfg, render, out_arg, save_codebook_arg);
        }

        if (synth->parsed()) {
            otc::SynthParams params;
            const auto size = parse_size(synth_size, "--size");
            const auto target = parse_size(synth_target, "--target");
            const auto vel = parse_doubles(synth_vel, 2, "--vel as DX,DY");
            params.width = size[0];
            params.height = size[1];
            params.target_w = target[0];
            params.target_h = target[1];
            params.vel_x = vel[0];
            params.vel_y = vel[1];
            params.frames = synth_frames;
            params.seed = synth_seed;
            params.distractors = synth_distractors;
            if (!synth_start.empty()) {
                const auto start = parse_doubles(synth_start, 2, "--start as CX,CY");
                params.start = {{start[0], start[1]}};
            }
            const otc::SynthResult result = otc::synth_generate(params, synth_out);
            otc::write_gt_csv(result.gt, synth_gt);
            std::cout << "wrote " << params.frames << " frames to " << synth_out << " and ground truth to "
                      << synth_gt << "\n";
            return 0;
        }

        if (eval->parsed()) {
            const auto metrics = otc::evaluate(otc::read_trajectory_csv(eval_traj),
                                               otc::read_gt_csv(eval_gt), eval_tau);
            std::printf("frames_evaluated %d\n", metrics.frames_evaluated);
            std::printf("mean_center_error %.6f\n", metrics.mean_center_error);
            std::printf("success_rate %.6f\n", metrics.success_rate);
            std::printf("lost_frames %d\n", metrics.lost_frames);
            return 0;
        }

        if (describe->parsed()) {
            const otc::Frame frame = otc::load_frame(describe_patch_arg);
            if (frame.width != frame.height || frame.width < 3 || frame.width % 2 == 0) {
                throw std::runtime_error(describe_patch_arg + ": patch image must be square with odd size");
            }
            const otc::GrayFrame gray = otc::to_gray(frame);
            const otc::BBox box{frame.width / 2.0, frame.height / 2.0,
                                static_cast<double>(frame.width), static_cast<double>(frame.height)};
            const auto patches = otc::sample_patches(frame, gray, box, {frame.width, 1});
            const otc::DescriptorMode mode = parse_mode(describe_mode);
            const auto curves = otc::compute_curves(patches.at(0), otc::strip_partitions(frame.width));
            std::printf("# size %d\n# mode %s\n", frame.width,
                        mode == otc::DescriptorMode::rgb ? "rgb" : "gray");
            for (int j = 0; j < otc::kNumOrientations; ++j) {
                std::printf("# curve %d\n", j);
                for (const double v : curves.gray[j]) std::printf("%.9f\n", v);
            }
            std::printf("# descriptor\n");
            for (const double v : otc::assemble_descriptor(curves, mode)) std::printf("%.9f\n", v);
            return 0;
        }

        if (inspect->parsed()) {
            const otc::Codebook cb = otc::load_codebook(inspect_path);
            std::printf("version 1\nk %u\nd %u\nseed %llu\n", cb.k, cb.d,
                        static_cast<unsigned long long>(cb.seed));
            for (std::uint32_t i = 0; i < cb.k; ++i) {
                std::printf("centroid %u norm %.6f\n", i,
                            std::sqrt(otc::kernels::squared_l2(cb.centroid(i), cb.d)));
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
