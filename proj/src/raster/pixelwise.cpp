// SPDX-License-Identifier: Apache-2.0
#include "geoagent/raster/pixelwise.hpp"

#include "geoagent/error.hpp"

namespace geoagent::raster {

void require_same_grid(const Raster& a, const Raster& b) {
    if (!a.same_grid(b))
        throw Error(Errc::ShapeMismatch, "raster shapes differ: " + std::to_string(a.width()) + "x" +
                                             std::to_string(a.height()) + " vs " +
                                             std::to_string(b.width()) + "x" +
                                             std::to_string(b.height()));
}

void require_band(const Raster& r, std::size_t band) {
    if (band >= r.bands())
        throw Error(Errc::BandOutOfRange, "band index " + std::to_string(band) + " but raster has " +
                                              std::to_string(r.bands()) + " band(s)");
}

Raster pixelwise(const Raster& a, const Raster& b, BinaryOp op, std::size_t band_a,
                 std::size_t band_b) {
    require_same_grid(a, b);
    require_band(a, band_a);
    require_band(b, band_b);
    const auto xa = a.masked_band(band_a);
    const auto xb = b.masked_band(band_b);
    std::vector<double> out(xa.size());
    simd::binary(op, xa, xb, out);
    return make_f32_like(a, std::move(out));
}

} // namespace geoagent::raster
