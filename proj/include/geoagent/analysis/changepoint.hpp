// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

namespace geoagent::analysis {

/// Sum of squared deviations from the mean over [begin, end).
class L2Cost {
public:
    explicit L2Cost(std::span<const double> y);
    double operator()(std::size_t begin, std::size_t end) const noexcept;

private:
    std::vector<double> sum_;
    std::vector<double> sq_;
};

struct Segmentation {
    std::vector<std::size_t> breakpoints;  // start index of each new segment
    double cost = 0.0;                     // sum of segment costs + penalty * breakpoints
};

/// Exact penalized segmentation by PELT with the L2 cost, minimum segment
/// length 2. Throws Error{TooShort} for n < 4 and Error{InvalidArgument}
/// for a non-positive penalty or missing values.
Segmentation detect_change_points(std::span<const double> y, double penalty);

/// Penalized cost of an explicit segmentation.
double segmentation_cost(std::span<const double> y, std::span<const std::size_t> breakpoints,
                         double penalty);

} // namespace geoagent::analysis
