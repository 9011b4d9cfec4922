#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"
#include "otc/kernels.hpp"

using namespace otc::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -3.0, double hi = 3.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

const std::vector<std::size_t> kSizes = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 127, 185, 1000};

}  // namespace

TEST_CASE("active isa is reported and selectable") {
    const Isa original = active();
    CHECK(supported(original));
    select(Isa::scalar);
    CHECK(active() == Isa::scalar);
    CHECK(std::string(isa_name(Isa::scalar)) == "scalar");
    CHECK(std::string(isa_name(Isa::avx2)) == "avx2");
    if (supported(Isa::avx2)) {
        select(Isa::avx2);
        CHECK(active() == Isa::avx2);
    } else {
        CHECK_THROWS_AS(select(Isa::avx2), std::invalid_argument);
    }
    select(original);
}

TEST_CASE("scalar reductions match hand values") {
    const double a[] = {1.0, 2.0, 3.0};
    const double b[] = {4.0, 0.5, -1.0};
    CHECK(scalar::sum(a, 3) == doctest::Approx(6.0));
    CHECK(scalar::dot(a, b, 3) == doctest::Approx(4.0 + 1.0 - 3.0));
    CHECK(scalar::squared_l2(a, 3) == doctest::Approx(14.0));
    CHECK(scalar::squared_distance(a, b, 3) == doctest::Approx(9.0 + 2.25 + 16.0));
    const double p[] = {0.5, 0.5};
    const double q[] = {0.9, 0.1};
    CHECK(scalar::bhattacharyya_sum(p, q, 2) ==
          doctest::Approx(std::sqrt(0.45) + std::sqrt(0.05)).epsilon(1e-12));
    CHECK(scalar::sum(a, 0) == 0.0);
}

TEST_CASE("negative products contribute nothing to the bhattacharyya sum") {
    const double a[] = {0.5, -0.5, 0.25};
    const double b[] = {0.5, 0.5, -4.0};
    CHECK(scalar::bhattacharyya_sum(a, b, 3) == doctest::Approx(0.5));
}

TEST_CASE("scalar luma uses the fixed channel weights") {
    const std::uint8_t rgb[] = {255, 255, 255, 0, 0, 0, 100, 200, 50};
    double out[3];
    scalar::luma_bt601(rgb, out, 3);
    CHECK(out[0] == doctest::Approx(255.0));
    CHECK(out[1] == 0.0);
    CHECK(out[2] == doctest::Approx(153.0).epsilon(1e-12));
}

#if OTC_KERNELS_X86
TEST_CASE("avx2 reductions agree with scalar across sizes") {
    if (!supported(Isa::avx2)) return;
    for (const std::size_t n : kSizes) {
        const std::vector<double> a = random_vector(n, 11 + n);
        const std::vector<double> b = random_vector(n, 77 + n, 0.0, 1.0);
        CAPTURE(n);
        CHECK(avx2::sum(a.data(), n) == doctest::Approx(scalar::sum(a.data(), n)).epsilon(1e-12));
        CHECK(avx2::dot(a.data(), b.data(), n) ==
              doctest::Approx(scalar::dot(a.data(), b.data(), n)).epsilon(1e-12));
        CHECK(avx2::squared_l2(a.data(), n) ==
              doctest::Approx(scalar::squared_l2(a.data(), n)).epsilon(1e-12));
        CHECK(avx2::squared_distance(a.data(), b.data(), n) ==
              doctest::Approx(scalar::squared_distance(a.data(), b.data(), n)).epsilon(1e-12));
        const std::vector<double> p = random_vector(n, 5 + n, 0.0, 1.0);
        CHECK(avx2::bhattacharyya_sum(p.data(), b.data(), n) ==
              doctest::Approx(scalar::bhattacharyya_sum(p.data(), b.data(), n)).epsilon(1e-12));
    }
}

TEST_CASE("avx2 elementwise kernels match scalar bitwise") {
    if (!supported(Isa::avx2)) return;
    for (const std::size_t n : kSizes) {
        CAPTURE(n);
        std::vector<double> x1 = random_vector(n, 3 + n);
        std::vector<double> x2 = x1;
        scalar::scale(x1.data(), n, 0.37);
        avx2::scale(x2.data(), n, 0.37);
        CHECK(x1 == x2);

        std::vector<double> acc1 = random_vector(n, 9 + n);
        std::vector<double> acc2 = acc1;
        const std::vector<double> add = random_vector(n, 21 + n);
        scalar::accumulate(acc1.data(), add.data(), n);
        avx2::accumulate(acc2.data(), add.data(), n);
        CHECK(acc1 == acc2);
    }
}

TEST_CASE("avx2 luma agrees with scalar") {
    if (!supported(Isa::avx2)) return;
    std::mt19937_64 rng(123);
    for (const std::size_t n : kSizes) {
        std::vector<std::uint8_t> rgb(3 * n);
        for (auto& v : rgb) v = static_cast<std::uint8_t>(rng());
        std::vector<double> out_s(n), out_v(n);
        scalar::luma_bt601(rgb.data(), out_s.data(), n);
        avx2::luma_bt601(rgb.data(), out_v.data(), n);
        CAPTURE(n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(out_v[i] == doctest::Approx(out_s[i]).epsilon(1e-12));
        }
    }
}
#endif

TEST_CASE("dispatched entry points follow the selected isa") {
    const Isa original = active();
    const std::vector<double> a = random_vector(256, 42);
    select(Isa::scalar);
    const double want = scalar::sum(a.data(), a.size());
    CHECK(sum(a.data(), a.size()) == want);
    if (supported(Isa::avx2)) {
        select(Isa::avx2);
        CHECK(sum(a.data(), a.size()) == doctest::Approx(want).epsilon(1e-12));
    }
    select(original);
}
