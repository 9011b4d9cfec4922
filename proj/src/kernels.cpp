#include "otc/kernels.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace otc::kernels {

namespace {

bool cpu_has_avx2() {
#if OTC_KERNELS_X86 && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa detect_best() { return cpu_has_avx2() ? Isa::avx2 : Isa::scalar; }

std::atomic<Isa>& active_slot() {
    static std::atomic<Isa> slot{detect_best()};
    return slot;
}

}  // namespace

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool supported(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

Isa active() { return active_slot().load(std::memory_order_relaxed); }

void select(Isa isa) {
    if (!supported(isa)) {
        throw std::invalid_argument(std::string("kernel ISA not supported on this CPU: ") + isa_name(isa));
    }
    active_slot().store(isa, std::memory_order_relaxed);
}

#if OTC_KERNELS_X86
#define OTC_DISPATCH(fn, ...) \
    return active() == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define OTC_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double sum(const double* x, std::size_t n) { OTC_DISPATCH(sum, x, n); }
double dot(const double* a, const double* b, std::size_t n) { OTC_DISPATCH(dot, a, b, n); }
double squared_l2(const double* x, std::size_t n) { OTC_DISPATCH(squared_l2, x, n); }
double squared_distance(const double* a, const double* b, std::size_t n) {
    OTC_DISPATCH(squared_distance, a, b, n);
}
double bhattacharyya_sum(const double* a, const double* b, std::size_t n) {
    OTC_DISPATCH(bhattacharyya_sum, a, b, n);
}
void scale(double* x, std::size_t n, double s) { OTC_DISPATCH(scale, x, n, s); }
void accumulate(double* acc, const double* x, std::size_t n) { OTC_DISPATCH(accumulate, acc, x, n); }
void luma_bt601(const std::uint8_t* rgb, double* out, std::size_t n) { OTC_DISPATCH(luma_bt601, rgb, out, n); }

#undef OTC_DISPATCH

}  // namespace otc::kernels
