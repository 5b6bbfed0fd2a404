// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "geoagent/raster/raster.hpp"
#include "geoagent/raster/workspace.hpp"
#include "geoagent/simd/kernels.hpp"

namespace geoagent::stats {

using raster::Raster;
using raster::Workspace;
using simd::Compare;

/// One per-band test, e.g. band 2 > 0.3.
struct Condition {
    std::size_t band = 0;
    Compare cmp = Compare::Greater;
    double value = 0.0;
};

/// Parses ">", "<", ">=", "<=" (and the Unicode forms). Throws
/// Error{InvalidArgument}.
Compare parse_comparator(std::string_view s);
std::string_view comparator_symbol(Compare c) noexcept;

/// Above is strict >, Below strict <.
enum class Side { Above, Below };
Compare side_comparator(Side s) noexcept;

struct ConditionCount {
    std::size_t selected = 0;
    std::size_t valid = 0;  ///< pixels valid in every referenced band
    double percentage() const noexcept {
        return valid ? 100.0 * double(selected) / double(valid) : 0.0;
    }
};

/// Pixels where every condition holds. Throws Error{InvalidArgument} for an
/// empty list and Error{ConditionBandMissing}.
ConditionCount count_conditions(const Raster& r, std::span<const Condition> conds);

/// u8 map, 1 where every condition holds (nodata pixels give 0).
Raster condition_mask(const Raster& r, std::span<const Condition> conds);

/// Percentage of valid pixels of `band` strictly above `threshold`.
double hotspot_percentage(const Raster& r, double threshold, std::size_t band = 0);

/// u8 map with 1 where `band` is strictly below `threshold`, GeoRef kept.
Raster hotspot_map(const Raster& r, double threshold, std::size_t band = 0);

std::vector<double> batch_hotspot_percentage(const Workspace& ws,
                                             std::span<const std::string> paths,
                                             double threshold, std::size_t band = 0);

/// Writes `<out_dir>/hotspot_<stem>.tif` per input, in order.
std::vector<std::filesystem::path> batch_hotspot_tif(const Workspace& ws,
                                                     std::span<const std::string> paths,
                                                     double threshold,
                                                     const std::string& out_dir,
                                                     std::size_t band = 0);

/// Mean over images of the percentage of pixels above `threshold`.
double threshold_ratio(const Workspace& ws, std::span<const std::string> paths, double threshold,
                       std::size_t band = 0);

/// Images whose share of pixels on `side` of `value_threshold` is strictly
/// greater than `ratio_threshold` (percent).
std::size_t count_images_exceeding_ratio(const Workspace& ws, std::span<const std::string> paths,
                                         double value_threshold, double ratio_threshold,
                                         Side side = Side::Above, std::size_t band = 0);

/// Mean of those per-image percentages above `value_threshold` that exceed
/// `ratio_threshold`. Throws Error{EmptySelection} when none does.
double average_ratio_exceeding(const Workspace& ws, std::span<const std::string> paths,
                               double value_threshold, double ratio_threshold,
                               std::size_t band = 0);

struct ImageMeanThreshold {
    std::size_t count = 0;
    double percentage = 0.0;
};

/// Images whose mean lies on `side` of `threshold`.
ImageMeanThreshold images_mean_vs_threshold(const Workspace& ws,
                                            std::span<const std::string> paths,
                                            double threshold, Side side = Side::Above,
                                            std::size_t band = 0);

/// Images whose mean lies on `side` of multiplier x (mean of means).
std::size_t count_images_vs_mean_multiplier(const Workspace& ws,
                                            std::span<const std::string> paths,
                                            double multiplier, Side side = Side::Above,
                                            std::size_t band = 0);

/// Per image, pixels with value > threshold.
std::vector<std::size_t> batch_fire_pixels(const Workspace& ws,
                                           std::span<const std::string> paths, double threshold,
                                           std::size_t band = 0);

/// u8 map, 1 where after - before > threshold.
Raster fire_increase_map(const Raster& before, const Raster& after, double threshold);

/// u8 map, 1 where the frequency map is strictly above its own
/// `percentile`-th value.
Raster fire_prone_areas(const Raster& frequency, double percentile);

/// Mean of `target` over pixels where `condition` passes its test.
/// Throws Error{ShapeMismatch}, Error{ConditionBandMissing},
/// Error{EmptySelection}.
double band_mean_by_condition(const Raster& target, std::size_t target_band,
                              const Raster& condition, std::size_t condition_band, Compare cmp,
                              double threshold);

/// Mean of `values` where `gate` > threshold.
double threshold_value_mean(const Raster& gate, const Raster& values, double threshold);

/// Percentage of pixels (valid in both) where a passes its test and b
/// passes its test.
double intersection_percentage(const Raster& a, Compare cmp_a, double threshold_a,
                               const Raster& b, Compare cmp_b, double threshold_b);

/// Mean of a/b over pixels with a valid, non-zero denominator.
double image_division_mean(const Raster& a, std::size_t band_a, const Raster& b,
                           std::size_t band_b);

} // namespace geoagent::stats
