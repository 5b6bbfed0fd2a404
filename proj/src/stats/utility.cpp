// SPDX-License-Identifier: Apache-2.0
#include "geoagent/stats/utility.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cmath>

#include "geoagent/raster/pixelwise.hpp"
#include "geoagent/stats/descriptive.hpp"

namespace geoagent::stats {

namespace fs = std::filesystem;

double difference(double a, double b) noexcept { return std::abs(a - b); }

double division(double a, double b) {
    if (b == 0.0) throw Error(Errc::DivisionByZero, "division by zero");
    return a / b;
}

double percentage_change(double old_value, double new_value) {
    if (old_value == 0.0) throw Error(Errc::ZeroBase, "percentage change from a zero base");
    return 100.0 * (new_value - old_value) / std::abs(old_value);
}

double multiply(double a, double b) noexcept { return a * b; }
double ceil_number(double x) noexcept { return std::ceil(x); }
double kelvin_to_celsius(double k) noexcept { return k - kKelvinOffset; }
double celsius_to_kelvin(double c) noexcept { return c + kKelvinOffset; }

namespace {

template <class Better>
ValueIndex extreme_with_index(std::span<const double> xs, Better better) {
    std::optional<ValueIndex> best;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (std::isnan(xs[i])) continue;
        if (!best || better(xs[i], best->value)) best = ValueIndex{xs[i], i};
    }
    if (!best) throw Error(Errc::EmptyList, "list has no values");
    return *best;
}

} // namespace

ValueIndex max_with_index(std::span<const double> xs) {
    return extreme_with_index(xs, [](double a, double b) { return a > b; });
}

ValueIndex min_with_index(std::span<const double> xs) {
    return extreme_with_index(xs, [](double a, double b) { return a < b; });
}

Raster tif_difference(const Raster& a, const Raster& b) {
    return raster::pixelwise(b, a, raster::BinaryOp::Sub);
}

Raster subtract(const Raster& a, const Raster& b) {
    return raster::pixelwise(a, b, raster::BinaryOp::Sub);
}

std::size_t nonzero_area(const Raster& r, std::size_t band) {
    raster::require_band(r, band);
    std::size_t n = 0;
    for (double v : r.band(band)) n += r.is_valid(v) && v != 0.0;
    return n;
}

double percentile_value(const Raster& r, double q, std::size_t band) {
    raster::require_band(r, band);
    auto v = r.valid_values(band);
    if (v.empty()) throw Error(Errc::EmptySelection, "image has no valid pixels");
    return percentile(std::move(v), q);
}

const std::array<Rgb, 256>& colormap_table() noexcept {
    // Perceptually uniform blue-green-yellow ramp, 9 anchors.
    static const std::array<Rgb, 256> table = [] {
        constexpr Rgb anchors[9] = {{68, 1, 84},    {71, 45, 123},  {59, 82, 139},
                                    {44, 114, 142}, {33, 145, 140}, {40, 174, 128},
                                    {94, 201, 98},  {173, 220, 48}, {253, 231, 37}};
        std::array<Rgb, 256> t{};
        for (std::size_t i = 0; i < 256; ++i) {
            const double pos = double(i) / 255.0 * 8.0;
            const auto k = std::min<std::size_t>(std::size_t(pos), 7);
            const double f = pos - double(k);
            auto mix = [&](std::uint8_t a, std::uint8_t b) {
                return static_cast<std::uint8_t>(std::lround(a + (b - a) * f));
            };
            t[i] = {mix(anchors[k].r, anchors[k + 1].r), mix(anchors[k].g, anchors[k + 1].g),
                    mix(anchors[k].b, anchors[k + 1].b)};
        }
        return t;
    }();
    return table;
}

Raster grayscale_to_colormap(const Raster& gray, std::size_t band) {
    raster::require_band(gray, band);
    const auto src = gray.band(band);
    const std::size_t n = gray.pixels();
    double lo = 0.0, hi = 255.0;
    if (gray.dtype() != raster::DataType::U8) {
        const Moments m = moments(gray.masked_band(band));
        lo = m.count ? m.min : 0.0;
        hi = m.count ? m.max : 0.0;
    }
    const auto& lut = colormap_table();
    Raster out(gray.width(), gray.height(), 3, raster::DataType::U8);
    for (std::size_t i = 0; i < n; ++i) {
        if (!gray.is_valid(src[i])) continue;
        const double t = hi > lo ? (src[i] - lo) / (hi - lo) : 0.0;
        const auto idx = static_cast<std::size_t>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
        out.data()[i] = lut[idx].r;
        out.data()[n + i] = lut[idx].g;
        out.data()[2 * n + i] = lut[idx].b;
    }
    out.set_geo(gray.geo());
    return out;
}

std::vector<std::string> get_filelist(const Workspace& ws, const std::string& dir,
                                      const std::optional<std::string>& pattern) {
    const fs::path root = ws.resolve_directory(dir);
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (pattern && fnmatch(pattern->c_str(), name.c_str(), 0) != 0) continue;
        names.push_back(name);
    }
    std::sort(names.begin(), names.end());
    return names;
}

} // namespace geoagent::stats
