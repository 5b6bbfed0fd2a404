// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geoagent/raster/raster.hpp"
#include "geoagent/raster/workspace.hpp"

namespace geoagent::stats {

using raster::Raster;
using raster::Workspace;

/// Population moments over the non-NaN entries of a sample.
struct Moments {
    std::size_t count = 0;
    double sum = 0.0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double m2 = 0.0;  ///< sum of squared deviations
    double m3 = 0.0;
    double m4 = 0.0;

    double variance() const noexcept { return count ? m2 / double(count) : 0.0; }
    double stddev() const noexcept;
    /// Throws Error{ZeroVariance}.
    double skewness() const;
    /// Excess kurtosis. Throws Error{ZeroVariance}.
    double kurtosis() const;
};

Moments moments(std::span<const double> values);

enum class ScalarStat { Mean, CV, Skewness, Kurtosis };

/// mean needs n >= 1, cv n >= 2, skewness n >= 3, kurtosis n >= 4
/// (Error{TooShort}). cv throws Error{ZeroMean}; skewness and kurtosis
/// throw Error{ZeroVariance}.
double scalar_stat(std::span<const double> data, ScalarStat stat);

/// Mean of the two middle values for even counts. Throws Error{EmptyList}.
double median(std::vector<double> values);

/// Linear interpolation between closest ranks, q in [0, 100].
double percentile(std::vector<double> values, double q);

enum class ImageStat { Mean, Std, Median, Min, Max, Skewness, Kurtosis, Sum };

std::string_view image_stat_name(ImageStat s) noexcept;

/// Statistic over the valid pixels of one band. Throws
/// Error{BandOutOfRange} and Error{EmptySelection} (no valid pixels).
double image_stat(const Raster& r, ImageStat stat, std::size_t band = 0);

/// Per-image statistic in input order. Errors carry the item index.
std::vector<double> batch_image_stat(const Workspace& ws, std::span<const std::string> paths,
                                     ImageStat stat, std::size_t band = 0);

struct MeanMaxMin {
    double mean_of_means;
    double max_of_maxes;
    double min_of_mins;
};

double batch_mean_of_means(const Workspace& ws, std::span<const std::string> paths,
                           std::size_t band = 0);
double batch_max_of_means(const Workspace& ws, std::span<const std::string> paths,
                          std::size_t band = 0);
MeanMaxMin batch_mean_max_min(const Workspace& ws, std::span<const std::string> paths,
                              std::size_t band = 0);

/// Loads every path, converting failures into indexed errors.
/// Throws Error{EmptyBatch} for an empty list.
template <class F>
auto map_images(const Workspace& ws, std::span<const std::string> paths, F&& f)
    -> std::vector<decltype(f(std::declval<const Raster&>()))>;

} // namespace geoagent::stats

#include "geoagent/stats/detail/map_images.hpp"
