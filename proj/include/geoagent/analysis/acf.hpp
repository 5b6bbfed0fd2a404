// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <vector>

namespace geoagent::analysis {

/// Biased autocorrelation for lags 0..max_lag.
/// Throws Error{ZeroVariance} for a constant series and
/// Error{InvalidArgument} when max_lag >= n.
std::vector<double> acf(std::span<const double> y, std::size_t max_lag);

struct Seasonality {
    std::optional<std::size_t> period;
    double strength = 0.0;   // ACF at the period, 0 when none
    double threshold = 0.0;  // 1.96 / sqrt(n)
};

/// First local ACF maximum at lag >= 2 above the 95% white-noise band.
/// max_lag 0 means n / 2.
Seasonality detect_seasonality_acf(std::span<const double> y, std::size_t max_lag = 0);

} // namespace geoagent::analysis
