#pragma once

// Data-parallel inner loops used by the descriptor, codebook and tracker
// code paths. Every kernel has a scalar reference implementation and, on
// x86-64, an AVX2+FMA variant. The active variant is picked once at startup
// from CPUID and can be overridden with select() (tests compare the two).

#include <cstddef>
#include <cstdint>

#if defined(__x86_64__) || defined(_M_X64)
#define OTC_KERNELS_X86 1
#else
#define OTC_KERNELS_X86 0
#endif

namespace otc::kernels {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa);
bool supported(Isa isa);
Isa active();
// Throws std::invalid_argument if the requested ISA is not supported here.
void select(Isa isa);

// Reductions. SIMD variants use a different summation order than the scalar
// reference, so results agree to rounding error, not bitwise.
double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double squared_l2(const double* x, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
// sum_i sqrt(max(a_i * b_i, 0))
double bhattacharyya_sum(const double* a, const double* b, std::size_t n);

// Elementwise.
void scale(double* x, std::size_t n, double s);
void accumulate(double* acc, const double* x, std::size_t n);
// BT.601 luma of n interleaved RGB8 pixels.
void luma_bt601(const std::uint8_t* rgb, double* out, std::size_t n);

namespace scalar {
double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double squared_l2(const double* x, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
double bhattacharyya_sum(const double* a, const double* b, std::size_t n);
void scale(double* x, std::size_t n, double s);
void accumulate(double* acc, const double* x, std::size_t n);
void luma_bt601(const std::uint8_t* rgb, double* out, std::size_t n);
}  // namespace scalar

#if OTC_KERNELS_X86
namespace avx2 {
double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double squared_l2(const double* x, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
double bhattacharyya_sum(const double* a, const double* b, std::size_t n);
void scale(double* x, std::size_t n, double s);
void accumulate(double* acc, const double* x, std::size_t n);
void luma_bt601(const std::uint8_t* rgb, double* out, std::size_t n);
}  // namespace avx2
#endif

inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

}  // namespace otc::kernels
