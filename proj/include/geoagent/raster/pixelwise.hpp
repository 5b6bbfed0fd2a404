// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "geoagent/raster/raster.hpp"
#include "geoagent/simd/kernels.hpp"

namespace geoagent::raster {

using simd::BinaryOp;

/// Pixelwise arithmetic on band `band_a` of `a` and `band_b` of `b`.
/// Result is f32 on a's grid with a's GeoRef; nodata and zero divisors
/// become NaN. Throws Error{ShapeMismatch} or Error{BandOutOfRange}.
Raster pixelwise(const Raster& a, const Raster& b, BinaryOp op,
                 std::size_t band_a = 0, std::size_t band_b = 0);

/// Throws Error{ShapeMismatch} unless all rasters share a grid.
void require_same_grid(const Raster& a, const Raster& b);

void require_band(const Raster& r, std::size_t band);

} // namespace geoagent::raster
