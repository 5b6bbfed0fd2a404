// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>

#include "geoagent/simd/kernels.hpp"
#include "kernels_impl.hpp"

namespace geoagent::simd::detail {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void binary_scalar(BinaryOp op, const double* a, const double* b, double* out, std::size_t n) {
    switch (op) {
    case BinaryOp::Add:
        for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
        break;
    case BinaryOp::Sub:
        for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
        break;
    case BinaryOp::Mul:
        for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
        break;
    case BinaryOp::Div:
        for (std::size_t i = 0; i < n; ++i) out[i] = b[i] == 0.0 ? kNaN : a[i] / b[i];
        break;
    case BinaryOp::AbsDiff:
        for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(a[i] - b[i]);
        break;
    }
}

void normalized_difference_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double den = a[i] + b[i];
        out[i] = den == 0.0 ? kNaN : (a[i] - b[i]) / den;
    }
}

void ratio_of_sums_scalar(const double* a, const double* b, const double* c, const double* d,
                          double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double den = c[i] + d[i];
        out[i] = den == 0.0 ? kNaN : (a[i] + b[i]) / den;
    }
}

void enhanced_vegetation_scalar(const double* nir, const double* red, const double* blue,
                                double* out, std::size_t n, double gain, double c1, double c2,
                                double l) {
    for (std::size_t i = 0; i < n; ++i) {
        const double den = ((nir[i] + c1 * red[i]) - c2 * blue[i]) + l;
        out[i] = den == 0.0 ? kNaN : (gain * (nir[i] - red[i])) / den;
    }
}

void affine_difference_scalar(const double* x, const double* y, double* out, std::size_t n,
                              double a, double b, double c) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (a * x[i] + b * (x[i] - y[i])) + c;
}

void scale_offset_scalar(const double* x, double* out, std::size_t n, double scale,
                         double offset) {
    for (std::size_t i = 0; i < n; ++i) out[i] = scale * x[i] + offset;
}

void compare_scalar_kernel(Compare cmp, const double* x, double t, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(x[i]))
            out[i] = kNaN;
        else
            out[i] = compare_scalar(cmp, x[i], t) ? 1.0 : 0.0;
    }
}

Summary summarize_scalar(const double* x, std::size_t n) {
    Summary s;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double v = x[i];
        if (std::isnan(v)) continue;
        ++s.count;
        s.sum += v;
        if (v < s.min) s.min = v;
        if (v > s.max) s.max = v;
    }
    if (s.count == 0) s.min = s.max = kNaN;
    return s;
}

CentralSums central_sums_scalar(const double* x, std::size_t n, double mean) {
    CentralSums c;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(x[i])) continue;
        const double d = x[i] - mean;
        const double d2 = d * d;
        c.m2 += d2;
        c.m3 += d2 * d;
        c.m4 += d2 * d2;
    }
    return c;
}

} // namespace

const KernelTable kScalarTable = {
    "scalar",
    binary_scalar,
    normalized_difference_scalar,
    ratio_of_sums_scalar,
    enhanced_vegetation_scalar,
    affine_difference_scalar,
    scale_offset_scalar,
    compare_scalar_kernel,
    summarize_scalar,
    central_sums_scalar,
};

} // namespace geoagent::simd::detail
