#include "otc/trajectory.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace otc {

namespace {

constexpr const char* kTrajectoryHeader = "frame,cx,cy,w,h,rho,iters,lost";
constexpr const char* kGtHeader = "frame,cx,cy,w,h";

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& cause) {
    throw std::runtime_error(path.string() + ": " + cause);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(path, "cannot open for writing");
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

template <typename Row, typename Parse>
std::vector<Row> read_csv(const std::filesystem::path& path, const char* header, std::size_t columns,
                          Parse parse) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "unreadable file");
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != header) {
        fail(path, std::string("corrupt header: expected '") + header + "'");
    }
    std::vector<Row> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != columns) {
            fail(path, "corrupt row at line " + std::to_string(lineno) + ": expected " +
                           std::to_string(columns) + " fields, got " + std::to_string(fields.size()));
        }
        try {
            rows.push_back(parse(fields));
        } catch (const std::exception&) {
            fail(path, "corrupt row at line " + std::to_string(lineno));
        }
    }
    return rows;
}

}  // namespace

void write_trajectory_csv(const std::vector<TrajectoryRow>& rows, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << kTrajectoryHeader << "\n";
    char buf[256];
    for (const TrajectoryRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f,%.6f,%.6f,%d,%d\n", r.frame, r.cx, r.cy,
                      r.w, r.h, r.rho, r.iters, r.lost);
        out << buf;
    }
    if (!out.good()) fail(path, "write error");
}

std::vector<TrajectoryRow> read_trajectory_csv(const std::filesystem::path& path) {
    return read_csv<TrajectoryRow>(path, kTrajectoryHeader, 8, [](const std::vector<std::string>& f) {
        TrajectoryRow r;
        r.frame = std::stoi(f[0]);
        r.cx = std::stod(f[1]);
        r.cy = std::stod(f[2]);
        r.w = std::stod(f[3]);
        r.h = std::stod(f[4]);
        r.rho = std::stod(f[5]);
        r.iters = std::stoi(f[6]);
        r.lost = std::stoi(f[7]);
        return r;
    });
}

void write_gt_csv(const std::vector<GroundTruthRow>& rows, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << kGtHeader << "\n";
    char buf[192];
    for (const GroundTruthRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f,%.6f\n", r.frame, r.cx, r.cy, r.w, r.h);
        out << buf;
    }
    if (!out.good()) fail(path, "write error");
}

std::vector<GroundTruthRow> read_gt_csv(const std::filesystem::path& path) {
    return read_csv<GroundTruthRow>(path, kGtHeader, 5, [](const std::vector<std::string>& f) {
        GroundTruthRow r;
        r.frame = std::stoi(f[0]);
        r.cx = std::stod(f[1]);
        r.cy = std::stod(f[2]);
        r.w = std::stod(f[3]);
        r.h = std::stod(f[4]);
        return r;
    });
}

}  // namespace otc
