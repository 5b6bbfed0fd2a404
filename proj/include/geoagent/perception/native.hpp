// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "geoagent/raster/raster.hpp"

namespace geoagent::perception {

using raster::Raster;

/// Corner-format box in pixel coordinates.
struct BBox {
    double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
    friend bool operator==(const BBox&, const BBox&) = default;
};

struct Point {
    double x = 0, y = 0;
    friend bool operator==(const Point&, const Point&) = default;
};

/// u8 image: 255 where value > threshold, else 0 (nodata gives 0).
/// Throws Error{MultiBandInput}.
Raster threshold_segmentation(const Raster& r, double threshold);

/// Pixels with value strictly greater than `threshold`.
std::size_t count_above_threshold(const Raster& r, double threshold);

/// One 3x3 erosion pass, Zhang-Suen thinning, then 8-connected component
/// count. Pixels are foreground when non-zero; values other than 0, 1 and
/// 255 raise Error{NonBinaryInput}.
std::size_t count_skeleton_contours(const Raster& binary);

/// Building blocks of count_skeleton_contours, on row-major 0/1 grids.
/// Outside the image counts as foreground for erosion.
std::vector<std::uint8_t> erode3x3(std::span<const std::uint8_t> img, std::size_t w,
                                   std::size_t h);
void zhang_suen_thin(std::vector<std::uint8_t>& img, std::size_t w, std::size_t h);
std::size_t count_components8(std::span<const std::uint8_t> img, std::size_t w, std::size_t h);

/// Grows every box by `radius` on each side, clamped to [0, width] x
/// [0, height].
std::vector<BBox> expand_bboxes(std::span<const BBox> boxes, double radius, double width,
                                double height);

std::vector<Point> bbox_centroids(std::span<const BBox> boxes);

struct PointPair {
    std::size_t i = 0, j = 0;
    double distance = 0;
};

struct DistanceExtremes {
    PointPair closest;
    PointPair farthest;
};

/// All-pairs Euclidean distances; first pair in (i, j) order wins ties.
/// Throws Error{EmptyList} for fewer than two points.
DistanceExtremes centroid_distance_extremes(std::span<const Point> pts);

/// Sum of w*h over [x, y, w, h] boxes. Negative sizes raise
/// Error{InvalidArgument}.
double total_bbox_area(std::span<const std::array<double, 4>> xywh);

} // namespace geoagent::perception
