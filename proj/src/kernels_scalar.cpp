#include "otc/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace otc::kernels::scalar {

double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double squared_l2(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double bhattacharyya_sum(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::sqrt(std::max(a[i] * b[i], 0.0));
    return s;
}

void scale(double* x, std::size_t n, double s) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= s;
}

void accumulate(double* acc, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void luma_bt601(const std::uint8_t* rgb, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double r = rgb[3 * i];
        const double g = rgb[3 * i + 1];
        const double b = rgb[3 * i + 2];
        out[i] = kLumaR * r + kLumaG * g + kLumaB * b;
    }
}

}  // namespace otc::kernels::scalar
