// SPDX-License-Identifier: Apache-2.0
// Port of the Cleveland et al. STL inner/outer loop (stlstp, stlss, stless,
// stlest, stlfts, stlma, stlrwt) restricted to jump = 1. Indices are
// 1-based inside the loess helpers to keep the arithmetic of the original.
#include "geoagent/analysis/stl.hpp"

#include <algorithm>
#include <cmath>

#include "geoagent/error.hpp"

namespace geoagent::analysis {

namespace {

// Local weighted linear fit at position xs over y[nleft..nright] (1-based).
bool loess_point(const double* y, std::size_t n, std::size_t len, double xs, double& ys,
                 std::size_t nleft, std::size_t nright, double* w, bool userw, const double* rw) {
    const double range = static_cast<double>(n) - 1.0;
    double h = std::max(xs - static_cast<double>(nleft), static_cast<double>(nright) - xs);
    if (len > n) h += static_cast<double>((len - n) / 2);
    const double h9 = 0.999 * h, h1 = 0.001 * h;
    double a = 0.0;
    for (std::size_t j = nleft; j <= nright; ++j) {
        w[j] = 0.0;
        const double r = std::abs(static_cast<double>(j) - xs);
        if (r <= h9) {
            if (r <= h1) {
                w[j] = 1.0;
            } else {
                const double q = r / h;
                const double c = 1.0 - q * q * q;
                w[j] = c * c * c;
            }
            if (userw) w[j] *= rw[j];
            a += w[j];
        }
    }
    if (a <= 0.0) return false;
    for (std::size_t j = nleft; j <= nright; ++j) w[j] /= a;
    if (h > 0.0) {
        a = 0.0;
        for (std::size_t j = nleft; j <= nright; ++j) a += w[j] * static_cast<double>(j);
        double b = xs - a;
        double c = 0.0;
        for (std::size_t j = nleft; j <= nright; ++j) {
            const double d = static_cast<double>(j) - a;
            c += w[j] * d * d;
        }
        if (std::sqrt(c) > 0.001 * range) {
            b /= c;
            for (std::size_t j = nleft; j <= nright; ++j)
                w[j] *= b * (static_cast<double>(j) - a) + 1.0;
        }
    }
    ys = 0.0;
    for (std::size_t j = nleft; j <= nright; ++j) ys += w[j] * y[j];
    return true;
}

// Loess smooth of y[1..n] into ys[1..n]; scratch must hold n + 1 doubles.
void loess(const double* y, std::size_t n, std::size_t len, bool userw, const double* rw,
           double* ys, double* scratch) {
    if (n < 2) {
        ys[1] = y[1];
        return;
    }
    std::size_t nleft = 1, nright = std::min(len, n);
    const std::size_t nsh = (len + 1) / 2;
    for (std::size_t i = 1; i <= n; ++i) {
        if (len < n && i > nsh && nright != n) {
            ++nleft;
            ++nright;
        }
        if (!loess_point(y, n, len, static_cast<double>(i), ys[i], nleft, nright, scratch, userw,
                         rw))
            ys[i] = y[i];
    }
}

// Moving average of length len over x[1..n] into ave[1..n-len+1].
void moving_average(const double* x, std::size_t n, std::size_t len, double* ave) {
    const std::size_t newn = n - len + 1;
    const double flen = static_cast<double>(len);
    double v = 0.0;
    for (std::size_t i = 1; i <= len; ++i) v += x[i];
    ave[1] = v / flen;
    for (std::size_t j = 2, k = len, m = 0; j <= newn; ++j) {
        ++k;
        ++m;
        v = v - x[m] + x[k];
        ave[j] = v / flen;
    }
}

// Low-pass filter: moving averages of length np, np, 3.
void low_pass(const double* x, std::size_t n, std::size_t np, double* trend, double* work) {
    moving_average(x, n, np, trend);
    moving_average(trend, n - np + 1, np, work);
    moving_average(work, n - 2 * np + 2, 3, trend);
}

// Cycle-subseries smoothing, extended one period on each side; writes
// season[1..n+2np].
void subseries(const double* y, std::size_t n, std::size_t np, std::size_t ns, bool userw,
               const double* rw, double* season, std::vector<double>& w1, std::vector<double>& w2,
               std::vector<double>& w3, std::vector<double>& w4) {
    for (std::size_t j = 1; j <= np; ++j) {
        const std::size_t k = (n - j) / np + 1;
        for (std::size_t i = 1; i <= k; ++i) w1[i] = y[(i - 1) * np + j];
        if (userw)
            for (std::size_t i = 1; i <= k; ++i) w3[i] = rw[(i - 1) * np + j];
        loess(w1.data(), k, ns, userw, w3.data(), w2.data() + 1, w4.data());
        std::size_t nright = std::min(ns, k);
        if (!loess_point(w1.data(), k, ns, 0.0, w2[1], 1, nright, w4.data(), userw, w3.data()))
            w2[1] = w2[2];
        const std::size_t nleft = k >= ns ? k - ns + 1 : 1;
        if (!loess_point(w1.data(), k, ns, static_cast<double>(k + 1), w2[k + 2], nleft, k,
                         w4.data(), userw, w3.data()))
            w2[k + 2] = w2[k + 1];
        for (std::size_t m = 1; m <= k + 2; ++m) season[(m - 1) * np + j] = w2[m];
    }
}

void robustness_weights(const double* y, std::size_t n, const double* fit, double* rw) {
    std::vector<double> r(n);
    for (std::size_t i = 1; i <= n; ++i) r[i - 1] = std::abs(y[i] - fit[i]);
    const std::size_t m1 = n / 2 + 1, m2 = n - m1 + 1;
    std::vector<double> s = r;
    std::nth_element(s.begin(), s.begin() + (m1 - 1), s.end());
    const double a = s[m1 - 1];
    std::nth_element(s.begin(), s.begin() + (m2 - 1), s.end());
    const double b = s[m2 - 1];
    const double cmad = 3.0 * (a + b);
    const double c9 = 0.999 * cmad, c1 = 0.001 * cmad;
    for (std::size_t i = 1; i <= n; ++i) {
        const double ri = r[i - 1];
        if (ri <= c1) {
            rw[i] = 1.0;
        } else if (ri <= c9) {
            const double q = ri / cmad;
            rw[i] = (1.0 - q * q) * (1.0 - q * q);
        } else {
            rw[i] = 0.0;
        }
    }
}

std::size_t odd_at_least(double v) {
    auto k = static_cast<std::size_t>(std::ceil(v));
    if (k % 2 == 0) ++k;
    return k;
}

} // namespace

StlResult stl_decompose(std::span<const double> input, std::size_t period, const StlOptions& opts) {
    if (period < 2) throw Error(Errc::InvalidArgument, "STL period must be at least 2");
    const std::size_t n = input.size();
    if (n < 2 * period)
        throw Error(Errc::PeriodTooLong, "STL needs at least two full periods (" +
                                             std::to_string(2 * period) + " samples), got " +
                                             std::to_string(n));
    for (double v : input)
        if (std::isnan(v)) throw Error(Errc::InvalidArgument, "STL input has missing values");

    const std::size_t np = period;
    std::size_t ns = std::max<std::size_t>(3, opts.seasonal_span);
    if (ns % 2 == 0) ++ns;
    std::size_t nt = opts.trend_span
                         ? opts.trend_span
                         : odd_at_least(1.5 * double(np) / (1.0 - 1.5 / double(ns)));
    nt = std::max<std::size_t>(3, nt);
    if (nt % 2 == 0) ++nt;
    std::size_t nl = opts.lowpass_span ? opts.lowpass_span : odd_at_least(double(np));
    nl = std::max<std::size_t>(3, nl);
    if (nl % 2 == 0) ++nl;

    // 1-based buffers.
    const std::size_t ext = n + 2 * np + 1;
    std::vector<double> y(n + 1), trend(n + 1, 0.0), season(n + 1, 0.0), rw(n + 1, 1.0);
    std::copy(input.begin(), input.end(), y.begin() + 1);
    std::vector<double> w1(ext), w2(ext), w3(ext), w4(ext), w5(ext);
    std::vector<double> s1(ext), s2(ext), s3(ext), s4(ext);

    bool userw = false;
    for (int outer = 0;; ++outer) {
        for (int inner = 0; inner < opts.inner_iterations; ++inner) {
            for (std::size_t i = 1; i <= n; ++i) w1[i] = y[i] - trend[i];
            subseries(w1.data(), n, np, ns, userw, rw.data(), w2.data(), s1, s2, s3, s4);
            low_pass(w2.data(), n + 2 * np, np, w3.data(), w1.data());
            loess(w3.data(), n, nl, false, rw.data(), w1.data(), w5.data());
            for (std::size_t i = 1; i <= n; ++i) season[i] = w2[np + i] - w1[i];
            for (std::size_t i = 1; i <= n; ++i) w1[i] = y[i] - season[i];
            loess(w1.data(), n, nt, userw, rw.data(), trend.data(), w5.data());
        }
        if (outer >= opts.robust_iterations) break;
        for (std::size_t i = 1; i <= n; ++i) w1[i] = trend[i] + season[i];
        robustness_weights(y.data(), n, w1.data(), rw.data());
        userw = true;
    }

    StlResult r;
    r.trend.assign(trend.begin() + 1, trend.end());
    r.seasonal.assign(season.begin() + 1, season.end());
    r.residual.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.residual[i] = input[i] - r.trend[i] - r.seasonal[i];
    if (userw) r.weights.assign(rw.begin() + 1, rw.end());
    else r.weights.assign(n, 1.0);
    return r;
}

} // namespace geoagent::analysis
