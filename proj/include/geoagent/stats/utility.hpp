// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geoagent/error.hpp"
#include "geoagent/raster/raster.hpp"
#include "geoagent/raster/workspace.hpp"

namespace geoagent::stats {

using raster::Raster;
using raster::Workspace;

inline constexpr double kKelvinOffset = 273.15;

/// |a - b|.
double difference(double a, double b) noexcept;
/// Throws Error{DivisionByZero}.
double division(double a, double b);
/// 100 * (new - old) / |old|. Throws Error{ZeroBase}.
double percentage_change(double old_value, double new_value);
double multiply(double a, double b) noexcept;
double ceil_number(double x) noexcept;
double kelvin_to_celsius(double k) noexcept;
double celsius_to_kelvin(double c) noexcept;

struct ValueIndex {
    double value;
    std::size_t index;
};

/// First occurrence wins. NaN entries are skipped. Throws Error{EmptyList}.
ValueIndex max_with_index(std::span<const double> xs);
ValueIndex min_with_index(std::span<const double> xs);

/// Python-style indexing (negative counts from the end).
/// Throws Error{InvalidArgument} for an index out of range.
template <class T>
std::vector<T> select_indexes(std::span<const T> xs, std::span<const long long> indexes) {
    std::vector<T> out;
    out.reserve(indexes.size());
    const auto n = static_cast<long long>(xs.size());
    for (long long i : indexes) {
        const long long k = i < 0 ? i + n : i;
        if (k < 0 || k >= n)
            throw Error(Errc::InvalidArgument, "index " + std::to_string(i) +
                                                   " out of range for a list of " +
                                                   std::to_string(n));
        out.push_back(xs[static_cast<std::size_t>(k)]);
    }
    return out;
}

/// b - a, f32.
Raster tif_difference(const Raster& a, const Raster& b);
/// a - b, f32.
Raster subtract(const Raster& a, const Raster& b);

/// Number of valid non-zero pixels in `band`.
std::size_t nonzero_area(const Raster& r, std::size_t band = 0);

/// Linear-interpolated percentile of the valid pixels. Throws
/// Error{EmptySelection}.
double percentile_value(const Raster& r, double q, std::size_t band = 0);

/// 256-entry RGB lookup table shipped with the library.
struct Rgb {
    std::uint8_t r, g, b;
};
const std::array<Rgb, 256>& colormap_table() noexcept;

/// 3-band u8 image. u8 inputs index the table directly; other dtypes are
/// stretched min..max over valid pixels. Nodata maps to black.
Raster grayscale_to_colormap(const Raster& gray, std::size_t band = 0);

/// Regular files in `dir`, names only, sorted bytewise; `pattern` is an
/// fnmatch glob. Throws Error{MissingDirectory}.
std::vector<std::string> get_filelist(const Workspace& ws, const std::string& dir,
                                      const std::optional<std::string>& pattern = {});

} // namespace geoagent::stats
