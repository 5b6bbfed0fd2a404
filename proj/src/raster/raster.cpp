// SPDX-License-Identifier: Apache-2.0
#include "geoagent/raster/raster.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

#include "geoagent/error.hpp"

namespace geoagent::raster {

std::string_view dtype_name(DataType t) noexcept {
    switch (t) {
    case DataType::U8: return "u8";
    case DataType::U16: return "u16";
    case DataType::F32: return "f32";
    }
    return "?";
}

Raster::Raster(std::size_t width, std::size_t height, std::size_t bands, DataType dtype)
    : Raster(width, height, bands, dtype, std::vector<double>(width * height * bands, 0.0)) {}

Raster::Raster(std::size_t width, std::size_t height, std::size_t bands, DataType dtype,
               std::vector<double> data)
    : width_(width), height_(height), bands_(bands), dtype_(dtype), data_(std::move(data)) {
    if (bands_ == 0) throw Error(Errc::InvalidArgument, "raster needs at least one band");
    if (data_.size() != width_ * height_ * bands_)
        throw Error(Errc::InvalidArgument,
                    "raster data length " + std::to_string(data_.size()) + " != " +
                        std::to_string(width_) + "x" + std::to_string(height_) + "x" +
                        std::to_string(bands_));
}

std::span<const double> Raster::band(std::size_t b) const {
    if (b >= bands_)
        throw Error(Errc::BandOutOfRange,
                    "band " + std::to_string(b) + " out of range (" + std::to_string(bands_) +
                        " bands)");
    return std::span<const double>(data_).subspan(b * pixels(), pixels());
}

std::span<double> Raster::band(std::size_t b) {
    if (b >= bands_)
        throw Error(Errc::BandOutOfRange,
                    "band " + std::to_string(b) + " out of range (" + std::to_string(bands_) +
                        " bands)");
    return std::span<double>(data_).subspan(b * pixels(), pixels());
}

std::vector<double> Raster::masked_band(std::size_t b) const {
    auto src = band(b);
    std::vector<double> out(src.begin(), src.end());
    if (nodata_ && !std::isnan(*nodata_)) {
        const double nd = *nodata_;
        for (double& v : out)
            if (v == nd) v = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

std::vector<double> Raster::valid_values(std::size_t b) const {
    auto src = band(b);
    std::vector<double> out;
    out.reserve(src.size());
    for (double v : src)
        if (is_valid(v)) out.push_back(v);
    return out;
}

namespace {

bool same_bits(double a, double b) noexcept { return std::memcmp(&a, &b, sizeof(double)) == 0; }

} // namespace

bool operator==(const Raster& a, const Raster& b) {
    if (a.width_ != b.width_ || a.height_ != b.height_ || a.bands_ != b.bands_ ||
        a.dtype_ != b.dtype_ || a.geo_ != b.geo_)
        return false;
    if (a.nodata_.has_value() != b.nodata_.has_value()) return false;
    if (a.nodata_ && !same_bits(*a.nodata_, *b.nodata_)) return false;
    return std::equal(a.data_.begin(), a.data_.end(), b.data_.begin(), b.data_.end(), same_bits);
}

Raster make_f32_like(const Raster& like, std::vector<double> values) {
    Raster out(like.width(), like.height(), 1, DataType::F32, std::move(values));
    out.set_nodata(std::numeric_limits<double>::quiet_NaN());
    out.set_geo(like.geo());
    narrow_to_dtype(out);
    return out;
}

Raster make_mask_like(const Raster& like, std::vector<double> values) {
    Raster out(like.width(), like.height(), 1, DataType::U8, std::move(values));
    out.set_geo(like.geo());
    return out;
}

void narrow_to_dtype(Raster& r) {
    auto data = r.data();
    switch (r.dtype()) {
    case DataType::F32:
        for (double& v : data) v = static_cast<double>(static_cast<float>(v));
        break;
    case DataType::U8:
        for (double& v : data) v = std::isnan(v) ? 0.0 : std::clamp(std::round(v), 0.0, 255.0);
        break;
    case DataType::U16:
        for (double& v : data)
            v = std::isnan(v) ? 0.0 : std::clamp(std::round(v), 0.0, 65535.0);
        break;
    }
}

} // namespace geoagent::raster
