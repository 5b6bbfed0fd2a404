// SPDX-License-Identifier: Apache-2.0
#pragma once

// Band-math inner loops.
//
// Every kernel exists as a scalar reference and, on x86-64, an AVX2 variant
// compiled in its own translation unit with -mavx2. `active()` picks the
// widest variant the CPU supports at first use; GEOAGENT_SIMD=scalar forces
// the reference path. Elementwise kernels are bit-identical across variants
// (no FMA contraction, same operation order); reductions agree to rounding.
//
// All kernels work in double. NaN marks nodata on input and output.

#include <cstddef>
#include <span>

namespace geoagent::simd {

enum class BinaryOp { Add, Sub, Mul, Div, AbsDiff };
enum class Compare { Greater, Less, GreaterEqual, LessEqual };

struct Summary {
    std::size_t count = 0;
    double sum = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct CentralSums {
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
};

struct KernelTable {
    const char* name;

    // out = a op b; Div with b == 0 yields NaN.
    void (*binary)(BinaryOp op, const double* a, const double* b, double* out, std::size_t n);

    // out = (a - b) / (a + b); zero denominator yields NaN.
    void (*normalized_difference)(const double* a, const double* b, double* out, std::size_t n);

    // out = (a + b) / (c + d); zero denominator yields NaN.
    void (*ratio_of_sums)(const double* a, const double* b, const double* c, const double* d,
                          double* out, std::size_t n);

    // out = gain * (nir - red) / (nir + c1*red - c2*blue + l); zero denominator yields NaN.
    void (*enhanced_vegetation)(const double* nir, const double* red, const double* blue,
                                double* out, std::size_t n, double gain, double c1, double c2,
                                double l);

    // out = a*x + b*(x - y) + c
    void (*affine_difference)(const double* x, const double* y, double* out, std::size_t n,
                              double a, double b, double c);

    // out = scale*x + offset
    void (*scale_offset)(const double* x, double* out, std::size_t n, double scale,
                         double offset);

    // out = 1 where x cmp threshold, 0 where not, NaN where x is NaN.
    void (*compare)(Compare cmp, const double* x, double threshold, double* out, std::size_t n);

    // count/sum/min/max over non-NaN samples.
    Summary (*summarize)(const double* x, std::size_t n);

    // sums of (x - mean)^k, k = 2..4, over non-NaN samples.
    CentralSums (*central_sums)(const double* x, std::size_t n, double mean);
};

const KernelTable& scalar_kernels() noexcept;

/// AVX2 table, or nullptr when not compiled in or not supported by the CPU.
const KernelTable* avx2_kernels() noexcept;

/// Variant chosen at runtime.
const KernelTable& active() noexcept;

// Span front-ends over `active()`. Lengths must match; the destination may
// alias an input.
void binary(BinaryOp op, std::span<const double> a, std::span<const double> b,
            std::span<double> out);
void normalized_difference(std::span<const double> a, std::span<const double> b,
                           std::span<double> out);
void compare(Compare cmp, std::span<const double> x, double threshold, std::span<double> out);
void scale_offset(std::span<const double> x, double scale, double offset, std::span<double> out);
Summary summarize(std::span<const double> x);
CentralSums central_sums(std::span<const double> x, double mean);

/// Exact comparison semantics used by every threshold tool.
inline bool compare_scalar(Compare cmp, double x, double t) noexcept {
    switch (cmp) {
    case Compare::Greater: return x > t;
    case Compare::Less: return x < t;
    case Compare::GreaterEqual: return x >= t;
    case Compare::LessEqual: return x <= t;
    }
    return false;
}

} // namespace geoagent::simd
