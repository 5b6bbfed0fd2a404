// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace geoagent::raster {

enum class DataType : std::uint8_t { U8, U16, F32 };

std::string_view dtype_name(DataType t) noexcept;

/// One TIFF tag carried through untouched. `bytes` holds the value payload
/// in little-endian order regardless of the source file's byte order.
struct GeoTag {
    std::uint16_t tag = 0;
    std::uint16_t type = 0;
    std::uint32_t count = 0;
    std::vector<std::uint8_t> bytes;

    friend bool operator==(const GeoTag&, const GeoTag&) = default;
};

struct Affine {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double pixel_x = 1.0;
    double pixel_y = -1.0;

    friend bool operator==(const Affine&, const Affine&) = default;
};

/// Georeferencing as opaque tag bytes (ModelPixelScale, ModelTiepoint,
/// GeoKeyDirectory, GeoDoubleParams, GeoAsciiParams).
struct GeoRef {
    std::vector<GeoTag> tags;
    std::optional<Affine> affine;

    bool empty() const noexcept { return tags.empty(); }
    friend bool operator==(const GeoRef&, const GeoRef&) = default;
};

inline constexpr std::uint16_t kGeoTagIds[] = {33550, 33922, 34735, 34736, 34737};

/// Multi-band grid, band-sequential, samples widened to double.
///
/// Stored values are exactly representable in the declared dtype; writers
/// narrow on save. A NaN sample is always treated as nodata, in addition to
/// the explicit `nodata` value when one is set.
class Raster {
public:
    Raster() = default;
    Raster(std::size_t width, std::size_t height, std::size_t bands, DataType dtype);
    Raster(std::size_t width, std::size_t height, std::size_t bands, DataType dtype,
           std::vector<double> data);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t bands() const noexcept { return bands_; }
    std::size_t pixels() const noexcept { return width_ * height_; }
    DataType dtype() const noexcept { return dtype_; }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }
    std::span<const double> band(std::size_t b) const;
    std::span<double> band(std::size_t b);

    double at(std::size_t b, std::size_t row, std::size_t col) const {
        return data_[b * pixels() + row * width_ + col];
    }
    double& at(std::size_t b, std::size_t row, std::size_t col) {
        return data_[b * pixels() + row * width_ + col];
    }

    const std::optional<double>& nodata() const noexcept { return nodata_; }
    void set_nodata(std::optional<double> v) noexcept { nodata_ = v; }

    const GeoRef& geo() const noexcept { return geo_; }
    void set_geo(GeoRef g) { geo_ = std::move(g); }

    bool is_valid(double v) const noexcept {
        if (std::isnan(v)) return false;
        return !(nodata_ && *nodata_ == v);
    }

    bool same_grid(const Raster& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    /// Copy of band `b` with every nodata sample replaced by NaN.
    std::vector<double> masked_band(std::size_t b) const;

    /// Dense vector of the valid samples of band `b`, in pixel order.
    std::vector<double> valid_values(std::size_t b) const;

    /// Bitwise sample comparison (NaN payloads included) plus metadata.
    friend bool operator==(const Raster& a, const Raster& b);

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::size_t bands_ = 0;
    DataType dtype_ = DataType::F32;
    std::vector<double> data_;
    std::optional<double> nodata_;
    GeoRef geo_;
};

/// Single-band f32 result on the grid of `like`, carrying its GeoRef and a
/// NaN nodata marker.
Raster make_f32_like(const Raster& like, std::vector<double> values);

/// Single-band u8 mask on the grid of `like`; no nodata marker.
Raster make_mask_like(const Raster& like, std::vector<double> values);

/// Rounds every sample to what the dtype can hold (f32 rounding, integer
/// saturation).
void narrow_to_dtype(Raster& r);

} // namespace geoagent::raster
