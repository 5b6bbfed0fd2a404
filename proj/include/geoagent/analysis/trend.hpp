// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace geoagent::analysis {

/// Series values with NaN marking a missing entry. Positions are the sample
/// indices unless explicit timestamps are supplied.
struct Series {
    std::vector<double> values;
    std::vector<double> timestamps;  // empty, or one per value

    double x(std::size_t i) const { return timestamps.empty() ? double(i) : timestamps[i]; }
};

enum class Trend { Increasing, Decreasing, NoTrend };
std::string_view trend_name(Trend t) noexcept;

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares over the non-missing samples.
/// Throws Error{DegenerateSeries} with fewer than two distinct positions.
LinearFit linear_trend(const Series& s);

struct MannKendall {
    long s = 0;
    double variance = 0.0;
    double tau = 0.0;
    double z = 0.0;
    double p_value = 1.0;
    Trend trend = Trend::NoTrend;
    double slope = 0.0;      // Sen's slope
    double intercept = 0.0;  // median(x_i - slope * i)
};

/// Two-sided test; needs at least 4 non-missing samples (Error{TooShort}).
MannKendall mann_kendall(const Series& s, double alpha = 0.05);

/// Median of pairwise slopes over non-missing pairs.
double sens_slope(const Series& s);

/// Number of consecutive-valid pairs whose increase exceeds `threshold`.
std::size_t count_spikes(std::span<const double> values, double threshold);

} // namespace geoagent::analysis
