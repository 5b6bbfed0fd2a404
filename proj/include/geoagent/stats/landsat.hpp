// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "geoagent/raster/raster.hpp"

namespace geoagent::stats {

using raster::Raster;

/// Collection-2 Level-2 surface reflectance scale pair.
inline constexpr double kSrScale = 2.75e-5;
inline constexpr double kSrOffset = -0.2;

/// QA_PIXEL bits 1 (dilated cloud), 2 (cirrus), 3 (cloud), 4 (shadow).
inline constexpr std::uint16_t kCloudBits = 0x1E;

/// f32 reflectance clamped to [0, 1]. Requires u16 DN (Error{WrongDtype}).
Raster radiometric_correction_sr(const Raster& dn);

/// f32 copy of band 0 with NaN wherever a cloud bit is set. QA must be u16
/// (Error{WrongDtype}) on the same grid (Error{ShapeMismatch}).
Raster apply_cloud_mask(const Raster& band, const Raster& qa);

} // namespace geoagent::stats
