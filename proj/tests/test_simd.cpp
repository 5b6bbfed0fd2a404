// SPDX-License-Identifier: Apache-2.0
// Equivalence of every kernel variant against the scalar reference.
#include <cstring>
#include <limits>

#include "doctest.h"
#include "geoagent/simd/kernels.hpp"
#include "test_util.hpp"

using namespace geoagent::simd;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same(double a, double b) {
    if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
    return std::memcmp(&a, &b, sizeof a) == 0;
}

// Random data with NaNs, zeros and cancelling pairs sprinkled in, at a
// length that exercises the vector tail.
std::vector<double> sample(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) {
        switch (rng() % 8) {
        case 0: x = kNaN; break;
        case 1: x = 0.0; break;
        case 2: x = -0.0; break;
        default: x = testutil::uniform(rng, -5, 5);
        }
    }
    return v;
}

std::vector<const KernelTable*> variants() {
    std::vector<const KernelTable*> out{&scalar_kernels()};
    if (auto* t = avx2_kernels()) out.push_back(t);
    return out;
}

} // namespace

TEST_CASE("active variant is one of the known tables") {
    const auto& a = active();
    const bool known = &a == &scalar_kernels() || &a == avx2_kernels();
    CHECK(known);
    MESSAGE("active kernels: " << a.name);
}

TEST_CASE("elementwise kernels are bit-identical across variants") {
    std::mt19937_64 rng(11);
    const auto& ref = scalar_kernels();
    for (const KernelTable* k : variants()) {
        for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u, 1031u}) {
            const auto a = sample(rng, n), b = sample(rng, n), c = sample(rng, n), d = sample(rng, n);
            std::vector<double> want(n), got(n);
            for (auto op : {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::AbsDiff}) {
                ref.binary(op, a.data(), b.data(), want.data(), n);
                k->binary(op, a.data(), b.data(), got.data(), n);
                for (std::size_t i = 0; i < n; ++i) REQUIRE(same(want[i], got[i]));
            }
            ref.normalized_difference(a.data(), b.data(), want.data(), n);
            k->normalized_difference(a.data(), b.data(), got.data(), n);
            for (std::size_t i = 0; i < n; ++i) REQUIRE(same(want[i], got[i]));

            ref.ratio_of_sums(a.data(), b.data(), c.data(), d.data(), want.data(), n);
            k->ratio_of_sums(a.data(), b.data(), c.data(), d.data(), got.data(), n);
            for (std::size_t i = 0; i < n; ++i) REQUIRE(same(want[i], got[i]));

            ref.enhanced_vegetation(a.data(), b.data(), c.data(), want.data(), n, 2.5, 6, 7.5, 1);
            k->enhanced_vegetation(a.data(), b.data(), c.data(), got.data(), n, 2.5, 6, 7.5, 1);
            for (std::size_t i = 0; i < n; ++i) REQUIRE(same(want[i], got[i]));

            ref.affine_difference(a.data(), b.data(), want.data(), n, 1.022, 0.47, 0.43);
            k->affine_difference(a.data(), b.data(), got.data(), n, 1.022, 0.47, 0.43);
            for (std::size_t i = 0; i < n; ++i) REQUIRE(same(want[i], got[i]));

            ref.scale_offset(a.data(), want.data(), n, 2.75e-5, -0.2);
            k->scale_offset(a.data(), got.data(), n, 2.75e-5, -0.2);
            for (std::size_t i = 0; i < n; ++i) REQUIRE(same(want[i], got[i]));

            for (auto cmp : {Compare::Greater, Compare::Less, Compare::GreaterEqual, Compare::LessEqual}) {
                ref.compare(cmp, a.data(), 0.0, want.data(), n);
                k->compare(cmp, a.data(), 0.0, got.data(), n);
                for (std::size_t i = 0; i < n; ++i) REQUIRE(same(want[i], got[i]));
            }
        }
    }
}

TEST_CASE("reductions agree across variants to rounding") {
    std::mt19937_64 rng(5);
    const auto& ref = scalar_kernels();
    for (const KernelTable* k : variants()) {
        for (std::size_t n : {0u, 1u, 2u, 7u, 8u, 333u, 4099u}) {
            const auto a = sample(rng, n);
            const Summary s0 = ref.summarize(a.data(), n);
            const Summary s1 = k->summarize(a.data(), n);
            CHECK(s0.count == s1.count);
            CHECK(s1.sum == doctest::Approx(s0.sum).epsilon(1e-12));
            CHECK(same(s0.min, s1.min));
            CHECK(same(s0.max, s1.max));
            const double mean = s0.count ? s0.sum / double(s0.count) : 0.0;
            const CentralSums c0 = ref.central_sums(a.data(), n, mean);
            const CentralSums c1 = k->central_sums(a.data(), n, mean);
            CHECK(c1.m2 == doctest::Approx(c0.m2).epsilon(1e-12));
            CHECK(c1.m3 == doctest::Approx(c0.m3).epsilon(1e-9).scale(c0.m2 + 1));
            CHECK(c1.m4 == doctest::Approx(c0.m4).epsilon(1e-12));
        }
    }
}

TEST_CASE("scalar kernel semantics") {
    const double a[] = {1, 2, kNaN, 5};
    const double b[] = {1, 0, 1, 2};
    double out[4];
    scalar_kernels().binary(BinaryOp::Div, a, b, out, 4);
    CHECK(out[0] == 1);
    CHECK(std::isnan(out[1]));
    CHECK(std::isnan(out[2]));
    CHECK(out[3] == 2.5);

    const double x[] = {1, 5, 9, kNaN};
    scalar_kernels().compare(Compare::Greater, x, 5, out, 4);
    CHECK(out[0] == 0);
    CHECK(out[1] == 0);
    CHECK(out[2] == 1);
    CHECK(std::isnan(out[3]));
    scalar_kernels().compare(Compare::GreaterEqual, x, 5, out, 4);
    CHECK(out[1] == 1);

    const Summary s = scalar_kernels().summarize(x, 4);
    CHECK(s.count == 3);
    CHECK(s.sum == 15);
    CHECK(s.min == 1);
    CHECK(s.max == 9);
    const Summary empty = scalar_kernels().summarize(x + 3, 1);
    CHECK(empty.count == 0);
    CHECK(std::isnan(empty.min));
}
