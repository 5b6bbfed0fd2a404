// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "geoagent/raster/raster.hpp"

namespace geoagent::analysis {

/// Gi* z-scores with binary square-window weights (centre included),
/// truncated at the edges and at nodata. Global mean and standard deviation
/// come from all valid pixels. A constant field, or a window whose
/// denominator vanishes, scores 0. Nodata pixels stay nodata.
std::vector<double> gi_star_scores(const raster::Raster& r, std::size_t kernel_radius = 1);

/// gi_star_scores as an f32 raster on the input grid.
raster::Raster getis_ord_gi_star(const raster::Raster& r, std::size_t kernel_radius = 1);

enum class Direction { North, East, South, West, CenterBalanced };
std::string_view direction_name(Direction d) noexcept;

struct HotspotDirection {
    Direction dominant = Direction::CenterBalanced;
    std::array<std::size_t, 4> counts{};  // N, E, S, W
    std::size_t total = 0;
};

/// Half-plane counts of hotspot pixels around the image centre. A pixel on
/// the centre row counts toward neither N nor S, one on the centre column
/// toward neither E nor W. Ties resolve in the order N, E, S, W.
HotspotDirection hotspot_direction(const raster::Raster& binary_map);

} // namespace geoagent::analysis
