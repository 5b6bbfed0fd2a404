// SPDX-License-Identifier: Apache-2.0
#include <cassert>
#include <cstdlib>
#include <string_view>

#include "geoagent/simd/kernels.hpp"
#include "kernels_impl.hpp"

namespace geoagent::simd {

const KernelTable& scalar_kernels() noexcept { return detail::kScalarTable; }

const KernelTable* avx2_kernels() noexcept {
#if defined(GEOAGENT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") != 0;
    }();
    return supported ? &detail::kAvx2Table : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() noexcept {
    static const KernelTable* table = [] {
        const char* forced = std::getenv("GEOAGENT_SIMD");
        if (forced && std::string_view(forced) == "scalar") return &scalar_kernels();
        if (const KernelTable* t = avx2_kernels()) return t;
        return &scalar_kernels();
    }();
    return *table;
}

void binary(BinaryOp op, std::span<const double> a, std::span<const double> b,
            std::span<double> out) {
    assert(a.size() == b.size() && a.size() == out.size());
    active().binary(op, a.data(), b.data(), out.data(), out.size());
}

void normalized_difference(std::span<const double> a, std::span<const double> b,
                           std::span<double> out) {
    assert(a.size() == b.size() && a.size() == out.size());
    active().normalized_difference(a.data(), b.data(), out.data(), out.size());
}

void compare(Compare cmp, std::span<const double> x, double threshold, std::span<double> out) {
    assert(x.size() == out.size());
    active().compare(cmp, x.data(), threshold, out.data(), out.size());
}

void scale_offset(std::span<const double> x, double scale, double offset, std::span<double> out) {
    assert(x.size() == out.size());
    active().scale_offset(x.data(), out.data(), out.size(), scale, offset);
}

Summary summarize(std::span<const double> x) { return active().summarize(x.data(), x.size()); }

CentralSums central_sums(std::span<const double> x, double mean) {
    return active().central_sums(x.data(), x.size(), mean);
}

} // namespace geoagent::simd
