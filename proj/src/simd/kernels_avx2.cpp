// SPDX-License-Identifier: Apache-2.0
// Compiled with -mavx2 -ffp-contract=off; only reached after a runtime
// CPU check.
#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <limits>

#include "geoagent/simd/kernels.hpp"
#include "kernels_impl.hpp"

namespace geoagent::simd::detail {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kLanes = 4;

inline __m256d nan_where_zero(__m256d den, __m256d value) {
    const __m256d zero_mask = _mm256_cmp_pd(den, _mm256_setzero_pd(), _CMP_EQ_OQ);
    return _mm256_blendv_pd(value, _mm256_set1_pd(kNaN), zero_mask);
}

void binary_avx2(BinaryOp op, const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    const std::size_t body = n - n % kLanes;
    const __m256d sign = _mm256_set1_pd(-0.0);
    for (; i < body; i += kLanes) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        __m256d r;
        switch (op) {
        case BinaryOp::Add: r = _mm256_add_pd(va, vb); break;
        case BinaryOp::Sub: r = _mm256_sub_pd(va, vb); break;
        case BinaryOp::Mul: r = _mm256_mul_pd(va, vb); break;
        case BinaryOp::Div: r = nan_where_zero(vb, _mm256_div_pd(va, vb)); break;
        case BinaryOp::AbsDiff: r = _mm256_andnot_pd(sign, _mm256_sub_pd(va, vb)); break;
        default: r = _mm256_setzero_pd(); break;
        }
        _mm256_storeu_pd(out + i, r);
    }
    kScalarTable.binary(op, a + i, b + i, out + i, n - i);
}

void normalized_difference_avx2(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    const std::size_t body = n - n % kLanes;
    for (; i < body; i += kLanes) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        const __m256d den = _mm256_add_pd(va, vb);
        const __m256d r = _mm256_div_pd(_mm256_sub_pd(va, vb), den);
        _mm256_storeu_pd(out + i, nan_where_zero(den, r));
    }
    kScalarTable.normalized_difference(a + i, b + i, out + i, n - i);
}

void ratio_of_sums_avx2(const double* a, const double* b, const double* c, const double* d,
                        double* out, std::size_t n) {
    std::size_t i = 0;
    const std::size_t body = n - n % kLanes;
    for (; i < body; i += kLanes) {
        const __m256d num = _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        const __m256d den = _mm256_add_pd(_mm256_loadu_pd(c + i), _mm256_loadu_pd(d + i));
        _mm256_storeu_pd(out + i, nan_where_zero(den, _mm256_div_pd(num, den)));
    }
    kScalarTable.ratio_of_sums(a + i, b + i, c + i, d + i, out + i, n - i);
}

void enhanced_vegetation_avx2(const double* nir, const double* red, const double* blue,
                              double* out, std::size_t n, double gain, double c1, double c2,
                              double l) {
    std::size_t i = 0;
    const std::size_t body = n - n % kLanes;
    const __m256d vg = _mm256_set1_pd(gain);
    const __m256d vc1 = _mm256_set1_pd(c1);
    const __m256d vc2 = _mm256_set1_pd(c2);
    const __m256d vl = _mm256_set1_pd(l);
    for (; i < body; i += kLanes) {
        const __m256d vn = _mm256_loadu_pd(nir + i);
        const __m256d vr = _mm256_loadu_pd(red + i);
        const __m256d vb = _mm256_loadu_pd(blue + i);
        __m256d den = _mm256_add_pd(vn, _mm256_mul_pd(vc1, vr));
        den = _mm256_sub_pd(den, _mm256_mul_pd(vc2, vb));
        den = _mm256_add_pd(den, vl);
        const __m256d num = _mm256_mul_pd(vg, _mm256_sub_pd(vn, vr));
        _mm256_storeu_pd(out + i, nan_where_zero(den, _mm256_div_pd(num, den)));
    }
    kScalarTable.enhanced_vegetation(nir + i, red + i, blue + i, out + i, n - i, gain, c1, c2,
                                     l);
}

void affine_difference_avx2(const double* x, const double* y, double* out, std::size_t n,
                            double a, double b, double c) {
    std::size_t i = 0;
    const std::size_t body = n - n % kLanes;
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    const __m256d vc = _mm256_set1_pd(c);
    for (; i < body; i += kLanes) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        const __m256d t = _mm256_add_pd(_mm256_mul_pd(va, vx),
                                        _mm256_mul_pd(vb, _mm256_sub_pd(vx, vy)));
        _mm256_storeu_pd(out + i, _mm256_add_pd(t, vc));
    }
    kScalarTable.affine_difference(x + i, y + i, out + i, n - i, a, b, c);
}

void scale_offset_avx2(const double* x, double* out, std::size_t n, double scale,
                       double offset) {
    std::size_t i = 0;
    const std::size_t body = n - n % kLanes;
    const __m256d vs = _mm256_set1_pd(scale);
    const __m256d vo = _mm256_set1_pd(offset);
    for (; i < body; i += kLanes)
        _mm256_storeu_pd(out + i,
                         _mm256_add_pd(_mm256_mul_pd(vs, _mm256_loadu_pd(x + i)), vo));
    kScalarTable.scale_offset(x + i, out + i, n - i, scale, offset);
}

void compare_avx2(Compare cmp, const double* x, double t, double* out, std::size_t n) {
    std::size_t i = 0;
    const std::size_t body = n - n % kLanes;
    const __m256d vt = _mm256_set1_pd(t);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d nan = _mm256_set1_pd(kNaN);
    for (; i < body; i += kLanes) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        __m256d m;
        switch (cmp) {
        case Compare::Greater: m = _mm256_cmp_pd(vx, vt, _CMP_GT_OQ); break;
        case Compare::Less: m = _mm256_cmp_pd(vx, vt, _CMP_LT_OQ); break;
        case Compare::GreaterEqual: m = _mm256_cmp_pd(vx, vt, _CMP_GE_OQ); break;
        case Compare::LessEqual: m = _mm256_cmp_pd(vx, vt, _CMP_LE_OQ); break;
        default: m = _mm256_setzero_pd(); break;
        }
        __m256d r = _mm256_and_pd(m, one);
        r = _mm256_blendv_pd(r, nan, _mm256_cmp_pd(vx, vx, _CMP_UNORD_Q));
        _mm256_storeu_pd(out + i, r);
    }
    kScalarTable.compare(cmp, x + i, t, out + i, n - i);
}

Summary summarize_avx2(const double* x, std::size_t n) {
    const double inf = std::numeric_limits<double>::infinity();
    __m256d sum = _mm256_setzero_pd();
    __m256d lo = _mm256_set1_pd(inf);
    __m256d hi = _mm256_set1_pd(-inf);
    __m256i count = _mm256_setzero_si256();
    std::size_t i = 0;
    const std::size_t body = n - n % kLanes;
    for (; i < body; i += kLanes) {
        const __m256d v = _mm256_loadu_pd(x + i);
        const __m256d valid = _mm256_cmp_pd(v, v, _CMP_ORD_Q);
        sum = _mm256_add_pd(sum, _mm256_and_pd(valid, v));
        lo = _mm256_min_pd(lo, _mm256_blendv_pd(_mm256_set1_pd(inf), v, valid));
        hi = _mm256_max_pd(hi, _mm256_blendv_pd(_mm256_set1_pd(-inf), v, valid));
        count = _mm256_sub_epi64(count, _mm256_castpd_si256(valid));
    }
    alignas(32) double s[4], mn[4], mx[4];
    alignas(32) std::int64_t c[4];
    _mm256_store_pd(s, sum);
    _mm256_store_pd(mn, lo);
    _mm256_store_pd(mx, hi);
    _mm256_store_si256(reinterpret_cast<__m256i*>(c), count);

    Summary tail = kScalarTable.summarize(x + i, n - i);
    Summary out;
    out.count = static_cast<std::size_t>(c[0] + c[1] + c[2] + c[3]) + tail.count;
    out.sum = ((s[0] + s[1]) + (s[2] + s[3])) + tail.sum;
    out.min = std::fmin(std::fmin(mn[0], mn[1]), std::fmin(mn[2], mn[3]));
    out.max = std::fmax(std::fmax(mx[0], mx[1]), std::fmax(mx[2], mx[3]));
    if (tail.count > 0) {
        out.min = std::fmin(out.min, tail.min);
        out.max = std::fmax(out.max, tail.max);
    }
    if (out.count == 0) out.min = out.max = kNaN;
    return out;
}

CentralSums central_sums_avx2(const double* x, std::size_t n, double mean) {
    __m256d s2 = _mm256_setzero_pd();
    __m256d s3 = _mm256_setzero_pd();
    __m256d s4 = _mm256_setzero_pd();
    const __m256d vm = _mm256_set1_pd(mean);
    std::size_t i = 0;
    const std::size_t body = n - n % kLanes;
    for (; i < body; i += kLanes) {
        const __m256d v = _mm256_loadu_pd(x + i);
        const __m256d valid = _mm256_cmp_pd(v, v, _CMP_ORD_Q);
        const __m256d d = _mm256_and_pd(valid, _mm256_sub_pd(v, vm));
        const __m256d d2 = _mm256_mul_pd(d, d);
        s2 = _mm256_add_pd(s2, d2);
        s3 = _mm256_add_pd(s3, _mm256_mul_pd(d2, d));
        s4 = _mm256_add_pd(s4, _mm256_mul_pd(d2, d2));
    }
    alignas(32) double a2[4], a3[4], a4[4];
    _mm256_store_pd(a2, s2);
    _mm256_store_pd(a3, s3);
    _mm256_store_pd(a4, s4);
    const CentralSums tail = kScalarTable.central_sums(x + i, n - i, mean);
    CentralSums out;
    out.m2 = ((a2[0] + a2[1]) + (a2[2] + a2[3])) + tail.m2;
    out.m3 = ((a3[0] + a3[1]) + (a3[2] + a3[3])) + tail.m3;
    out.m4 = ((a4[0] + a4[1]) + (a4[2] + a4[3])) + tail.m4;
    return out;
}

} // namespace

const KernelTable kAvx2Table = {
    "avx2",
    binary_avx2,
    normalized_difference_avx2,
    ratio_of_sums_avx2,
    enhanced_vegetation_avx2,
    affine_difference_avx2,
    scale_offset_avx2,
    compare_avx2,
    summarize_avx2,
    central_sums_avx2,
};

} // namespace geoagent::simd::detail
