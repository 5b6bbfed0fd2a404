// SPDX-License-Identifier: Apache-2.0
#include "geoagent/analysis/trend.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "geoagent/error.hpp"

namespace geoagent::analysis {

namespace {

struct Point {
    double x, y;
};

std::vector<Point> valid_points(const Series& s) {
    if (!s.timestamps.empty() && s.timestamps.size() != s.values.size())
        throw Error(Errc::InvalidArgument, "timestamps and values differ in length");
    std::vector<Point> p;
    for (std::size_t i = 0; i < s.values.size(); ++i)
        if (!std::isnan(s.values[i])) p.push_back({s.x(i), s.values[i]});
    return p;
}

double median(std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    const double hi = v[n / 2];
    if (n % 2) return hi;
    return (*std::max_element(v.begin(), v.begin() + n / 2) + hi) / 2.0;
}

double pairwise_median_slope(const std::vector<Point>& p) {
    std::vector<double> slopes;
    slopes.reserve(p.size() * (p.size() - 1) / 2);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (p[j].x != p[i].x) slopes.push_back((p[j].y - p[i].y) / (p[j].x - p[i].x));
    if (slopes.empty()) throw Error(Errc::DegenerateSeries, "all positions coincide");
    return median(std::move(slopes));
}

} // namespace

std::string_view trend_name(Trend t) noexcept {
    switch (t) {
    case Trend::Increasing: return "increasing";
    case Trend::Decreasing: return "decreasing";
    case Trend::NoTrend: return "no trend";
    }
    return "?";
}

LinearFit linear_trend(const Series& s) {
    const auto p = valid_points(s);
    if (p.size() < 2) throw Error(Errc::DegenerateSeries, "need at least two valid samples");
    const double n = static_cast<double>(p.size());
    double mx = 0, my = 0;
    for (const auto& q : p) {
        mx += q.x;
        my += q.y;
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& q : p) {
        sxx += (q.x - mx) * (q.x - mx);
        sxy += (q.x - mx) * (q.y - my);
        syy += (q.y - my) * (q.y - my);
    }
    if (sxx == 0.0) throw Error(Errc::DegenerateSeries, "all positions coincide");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

MannKendall mann_kendall(const Series& s, double alpha) {
    const auto p = valid_points(s);
    if (p.size() < 4)
        throw Error(Errc::TooShort, "Mann-Kendall needs at least 4 valid samples, got " +
                                        std::to_string(p.size()));
    const std::size_t n = p.size();
    MannKendall r;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            r.s += (p[j].y > p[i].y) - (p[j].y < p[i].y);

    std::map<double, std::size_t> ties;
    for (const auto& q : p) ++ties[q.y];
    const double dn = static_cast<double>(n);
    double var = dn * (dn - 1) * (2 * dn + 5);
    for (const auto& [value, t] : ties) {
        const double dt = static_cast<double>(t);
        var -= dt * (dt - 1) * (2 * dt + 5);
    }
    r.variance = var / 18.0;
    r.tau = static_cast<double>(r.s) / (dn * (dn - 1) / 2.0);
    if (r.variance > 0.0) {
        if (r.s > 0) r.z = (static_cast<double>(r.s) - 1.0) / std::sqrt(r.variance);
        else if (r.s < 0) r.z = (static_cast<double>(r.s) + 1.0) / std::sqrt(r.variance);
    }
    r.p_value = std::erfc(std::abs(r.z) / std::sqrt(2.0));
    if (r.p_value < alpha) r.trend = r.z > 0 ? Trend::Increasing : Trend::Decreasing;

    r.slope = pairwise_median_slope(p);
    std::vector<double> icpt;
    for (const auto& q : p) icpt.push_back(q.y - r.slope * q.x);
    r.intercept = median(std::move(icpt));
    return r;
}

double sens_slope(const Series& s) {
    const auto p = valid_points(s);
    if (p.size() < 2)
        throw Error(Errc::TooShort, "Sen's slope needs at least 2 valid samples");
    return pairwise_median_slope(p);
}

std::size_t count_spikes(std::span<const double> values, double threshold) {
    std::size_t count = 0;
    bool have_prev = false;
    double prev = 0.0;
    for (double v : values) {
        if (std::isnan(v)) continue;
        if (have_prev && v - prev > threshold) ++count;
        prev = v;
        have_prev = true;
    }
    return count;
}

} // namespace geoagent::analysis
