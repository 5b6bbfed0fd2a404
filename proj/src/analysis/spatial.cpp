// SPDX-License-Identifier: Apache-2.0
#include "geoagent/analysis/spatial.hpp"

#include <cmath>
#include <limits>

#include "geoagent/error.hpp"

namespace geoagent::analysis {

using raster::Raster;

std::vector<double> gi_star_scores(const Raster& r, std::size_t radius) {
    if (r.bands() != 1) throw Error(Errc::MultiBandInput, "Gi* expects a single band");
    if (radius < 1) throw Error(Errc::InvalidArgument, "kernel radius must be at least 1");
    const std::size_t w = r.width(), h = r.height();
    const auto x = r.masked_band(0);
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

    double n = 0, sum = 0, first = kNaN;
    bool constant = true;
    for (double v : x) {
        if (std::isnan(v)) continue;
        if (n == 0) first = v;
        constant = constant && v == first;
        n += 1;
        sum += v;
    }
    std::vector<double> out(x.size(), kNaN);
    if (n == 0) return out;
    const double mean = sum / n;
    double m2 = 0;
    for (double v : x)
        if (!std::isnan(v)) m2 += (v - mean) * (v - mean);
    const double sd = std::sqrt(m2 / n);
    const bool flat = constant || sd == 0.0;

    for (std::size_t row = 0; row < h; ++row) {
        for (std::size_t col = 0; col < w; ++col) {
            const std::size_t i = row * w + col;
            if (std::isnan(x[i])) continue;
            if (flat) {
                out[i] = 0.0;
                continue;
            }
            const std::size_t r0 = row >= radius ? row - radius : 0;
            const std::size_t c0 = col >= radius ? col - radius : 0;
            const std::size_t r1 = std::min(h - 1, row + radius);
            const std::size_t c1 = std::min(w - 1, col + radius);
            double wsum = 0, local = 0;
            for (std::size_t rr = r0; rr <= r1; ++rr)
                for (std::size_t cc = c0; cc <= c1; ++cc) {
                    const double v = x[rr * w + cc];
                    if (std::isnan(v)) continue;
                    wsum += 1;
                    local += v;
                }
            // Binary weights: sum of squared weights equals the weight count.
            const double spread = (n * wsum - wsum * wsum) / (n - 1.0);
            const double denom = sd * std::sqrt(std::max(0.0, spread));
            out[i] = denom > 0.0 ? (local - mean * wsum) / denom : 0.0;
        }
    }
    return out;
}

raster::Raster getis_ord_gi_star(const Raster& r, std::size_t radius) {
    return raster::make_f32_like(r, gi_star_scores(r, radius));
}

std::string_view direction_name(Direction d) noexcept {
    switch (d) {
    case Direction::North: return "North";
    case Direction::East: return "East";
    case Direction::South: return "South";
    case Direction::West: return "West";
    case Direction::CenterBalanced: return "Center-balanced";
    }
    return "?";
}

HotspotDirection hotspot_direction(const Raster& map) {
    if (map.bands() != 1) throw Error(Errc::MultiBandInput, "hotspot map must be single band");
    const std::size_t w = map.width(), h = map.height();
    const double cx = (static_cast<double>(w) - 1.0) / 2.0;
    const double cy = (static_cast<double>(h) - 1.0) / 2.0;
    HotspotDirection out;
    const auto band = map.band(0);
    for (std::size_t row = 0; row < h; ++row) {
        for (std::size_t col = 0; col < w; ++col) {
            const double v = band[row * w + col];
            if (!map.is_valid(v) || v == 0.0) continue;
            if (v != 1.0 && v != 255.0)
                throw Error(Errc::NonBinaryInput,
                            "hotspot map value " + std::to_string(v) + " is not binary");
            ++out.total;
            const double y = static_cast<double>(row), x = static_cast<double>(col);
            if (y < cy) ++out.counts[0];
            if (x > cx) ++out.counts[1];
            if (y > cy) ++out.counts[2];
            if (x < cx) ++out.counts[3];
        }
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < 4; ++k)
        if (out.counts[k] > out.counts[best]) best = k;
    if (out.counts[best] > 0) out.dominant = static_cast<Direction>(best);
    return out;
}

} // namespace geoagent::analysis
