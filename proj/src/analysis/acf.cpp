// SPDX-License-Identifier: Apache-2.0
#include "geoagent/analysis/acf.hpp"

#include <cmath>

#include "geoagent/error.hpp"

namespace geoagent::analysis {

std::vector<double> acf(std::span<const double> y, std::size_t max_lag) {
    const std::size_t n = y.size();
    if (max_lag >= n)
        throw Error(Errc::InvalidArgument, "max_lag " + std::to_string(max_lag) +
                                               " must be below the series length " +
                                               std::to_string(n));
    double mean = 0.0;
    for (double v : y) {
        if (std::isnan(v)) throw Error(Errc::InvalidArgument, "series has missing values");
        mean += v;
    }
    mean /= static_cast<double>(n);
    double denom = 0.0;
    for (double v : y) denom += (v - mean) * (v - mean);
    if (denom == 0.0) throw Error(Errc::ZeroVariance, "series is constant");
    std::vector<double> out(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double s = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) s += (y[t] - mean) * (y[t + k] - mean);
        out[k] = s / denom;
    }
    return out;
}

Seasonality detect_seasonality_acf(std::span<const double> y, std::size_t max_lag) {
    if (max_lag == 0) max_lag = y.size() / 2;
    const auto r = acf(y, max_lag);
    Seasonality s;
    s.threshold = 1.96 / std::sqrt(static_cast<double>(y.size()));
    for (std::size_t k = 2; k < max_lag; ++k) {
        if (r[k] > r[k - 1] && r[k] >= r[k + 1] && r[k] > s.threshold) {
            s.period = k;
            s.strength = r[k];
            break;
        }
    }
    return s;
}

} // namespace geoagent::analysis
