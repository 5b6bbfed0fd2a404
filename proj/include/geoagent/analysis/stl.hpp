// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

namespace geoagent::analysis {

struct StlOptions {
    std::size_t seasonal_span = 7;
    std::size_t trend_span = 0;     // 0: next odd >= 1.5 p / (1 - 1.5 / seasonal_span)
    std::size_t lowpass_span = 0;   // 0: next odd >= p
    int inner_iterations = 2;
    int robust_iterations = 1;
};

struct StlResult {
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> residual;
    std::vector<double> weights;  // robustness weights of the last pass
};

/// Additive seasonal-trend decomposition by LOESS (degree 1 everywhere,
/// no jumps). residual = y - trend - seasonal exactly.
/// Throws Error{PeriodTooLong} unless n >= 2 * period, and
/// Error{InvalidArgument} for period < 2 or missing values.
StlResult stl_decompose(std::span<const double> y, std::size_t period,
                        const StlOptions& opts = {});

} // namespace geoagent::analysis
