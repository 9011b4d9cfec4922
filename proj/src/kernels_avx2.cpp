#include "otc/kernels.hpp"

#if OTC_KERNELS_X86

#include <immintrin.h>

#include <algorithm>
#include <cmath>

// This translation unit is compiled with -mavx2 -mfma; nothing here runs
// unless the dispatcher confirmed CPU support first.

namespace otc::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

}  // namespace

double sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double squared_l2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double bhattacharyya_sum(const double* a, const double* b, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    __m256d acc = zero;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        p = _mm256_max_pd(p, zero);
        acc = _mm256_add_pd(acc, _mm256_sqrt_pd(p));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += std::sqrt(std::max(a[i] * b[i], 0.0));
    return s;
}

void scale(double* x, std::size_t n, double s) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vs));
    }
    for (; i < n; ++i) x[i] *= s;
}

void accumulate(double* acc, const double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) acc[i] += x[i];
}

void luma_bt601(const std::uint8_t* rgb, double* out, std::size_t n) {
    const __m256d wr = _mm256_set1_pd(kLumaR);
    const __m256d wg = _mm256_set1_pd(kLumaG);
    const __m256d wb = _mm256_set1_pd(kLumaB);
    // Byte gathers for 4 interleaved RGB pixels inside one 16-byte load.
    const __m128i pick_r = _mm_setr_epi8(0, 3, 6, 9, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1);
    const __m128i pick_g = _mm_setr_epi8(1, 4, 7, 10, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1);
    const __m128i pick_b = _mm_setr_epi8(2, 5, 8, 11, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1);

    std::size_t i = 0;
    // The 16-byte load touches bytes [3i, 3i+16); stay clear of the buffer end.
    while (i + 4 <= n && 3 * i + 16 <= 3 * n) {
        const __m128i bytes = _mm_loadu_si128(reinterpret_cast<const __m128i*>(rgb + 3 * i));
        const __m256d r = _mm256_cvtepi32_pd(_mm_cvtepu8_epi32(_mm_shuffle_epi8(bytes, pick_r)));
        const __m256d g = _mm256_cvtepi32_pd(_mm_cvtepu8_epi32(_mm_shuffle_epi8(bytes, pick_g)));
        const __m256d b = _mm256_cvtepi32_pd(_mm_cvtepu8_epi32(_mm_shuffle_epi8(bytes, pick_b)));
        const __m256d y =
            _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(wr, r), _mm256_mul_pd(wg, g)), _mm256_mul_pd(wb, b));
        _mm256_storeu_pd(out + i, y);
        i += 4;
    }
    for (; i < n; ++i) {
        const double r = rgb[3 * i];
        const double g = rgb[3 * i + 1];
        const double b = rgb[3 * i + 2];
        out[i] = kLumaR * r + kLumaG * g + kLumaB * b;
    }
}

}  // namespace otc::kernels::avx2

#endif  // OTC_KERNELS_X86
