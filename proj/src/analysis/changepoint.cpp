// SPDX-License-Identifier: Apache-2.0
#include "geoagent/analysis/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geoagent/error.hpp"

namespace geoagent::analysis {

namespace {
constexpr std::size_t kMinSegment = 2;
}

L2Cost::L2Cost(std::span<const double> y) : sum_(y.size() + 1, 0.0), sq_(y.size() + 1, 0.0) {
    for (std::size_t i = 0; i < y.size(); ++i) {
        sum_[i + 1] = sum_[i] + y[i];
        sq_[i + 1] = sq_[i] + y[i] * y[i];
    }
}

double L2Cost::operator()(std::size_t begin, std::size_t end) const noexcept {
    const double s = sum_[end] - sum_[begin];
    const double q = sq_[end] - sq_[begin];
    return std::max(0.0, q - s * s / static_cast<double>(end - begin));
}

Segmentation detect_change_points(std::span<const double> y, double penalty) {
    const std::size_t n = y.size();
    if (n < 4) throw Error(Errc::TooShort, "change-point detection needs at least 4 samples");
    if (!(penalty > 0.0)) throw Error(Errc::InvalidArgument, "penalty must be positive");
    for (double v : y)
        if (std::isnan(v)) throw Error(Errc::InvalidArgument, "series has missing values");

    const L2Cost cost(y);
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> best(n + 1, kInf);
    std::vector<std::size_t> last(n + 1, 0);
    best[0] = -penalty;

    // A candidate pruned at time t is still needed at t + 1: the pruning
    // bound compares against a segment [t, T) that is too short there.
    struct Candidate {
        std::size_t start;
        std::size_t usable_until;
    };
    std::vector<Candidate> cands{{0, n}};
    std::vector<double> seen(n + 1, kInf);
    for (std::size_t t = kMinSegment; t <= n; ++t) {
        for (const Candidate& c : cands) {
            if (c.usable_until < t || t - c.start < kMinSegment) continue;
            const double v = best[c.start] + cost(c.start, t) + penalty;
            seen[c.start] = v - penalty;
            if (v < best[t]) {
                best[t] = v;
                last[t] = c.start;
            }
        }
        std::vector<Candidate> kept;
        for (Candidate c : cands) {
            if (c.usable_until < t) continue;
            if (t - c.start >= kMinSegment && seen[c.start] > best[t])
                c.usable_until = std::min(c.usable_until, t + 1);
            kept.push_back(c);
        }
        if (t + kMinSegment <= n && best[t] < kInf) kept.push_back({t, n});
        cands.swap(kept);
    }

    Segmentation seg;
    for (std::size_t t = n; t > 0; t = last[t])
        if (last[t] > 0) seg.breakpoints.push_back(last[t]);
    std::reverse(seg.breakpoints.begin(), seg.breakpoints.end());
    seg.cost = best[n];
    return seg;
}

double segmentation_cost(std::span<const double> y, std::span<const std::size_t> bps,
                         double penalty) {
    const L2Cost cost(y);
    double total = 0.0;
    std::size_t start = 0;
    for (std::size_t b : bps) {
        total += cost(start, b) + penalty;
        start = b;
    }
    return total + cost(start, y.size());
}

} // namespace geoagent::analysis
