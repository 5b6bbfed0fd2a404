// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geoagent/raster/raster.hpp"
#include "geoagent/raster/workspace.hpp"

namespace geoagent::index {

using raster::Raster;
using raster::Workspace;

enum class IndexKind { NDVI, NDWI, NDBI, EVI, NBR, FVC, WRI, NDTI, NDSI };
enum class BandRole { Blue, Green, Red, NIR, SWIR };

inline constexpr IndexKind kAllKinds[] = {IndexKind::NDVI, IndexKind::NDWI, IndexKind::NDBI,
                                          IndexKind::EVI,  IndexKind::NBR,  IndexKind::FVC,
                                          IndexKind::WRI,  IndexKind::NDTI, IndexKind::NDSI};

/// Lowercase kind name, used in output filenames and tool names.
std::string_view kind_name(IndexKind k) noexcept;
std::string_view role_name(BandRole r) noexcept;

/// Roles a kind reads, in the order the first one names the output.
std::span<const BandRole> required_roles(IndexKind k) noexcept;

struct ValueRange {
    double lo;
    double hi;
};

/// Range of valid output pixels for non-negative reflectance inputs.
ValueRange declared_range(IndexKind k) noexcept;

bool is_normalized_difference(IndexKind k) noexcept;

struct IndexParams {
    double fvc_ndvi_min = 0.05;
    double fvc_ndvi_max = 0.86;
};

using BandSet = std::map<BandRole, const Raster*>;
using BandPaths = std::map<BandRole, std::string>;

/// Single-band f32 index on the grid of the first role's raster.
/// Zero denominators and nodata inputs give NaN.
Raster compute_index(IndexKind kind, const BandSet& bands, const IndexParams& params = {});

/// FVC = clamp((ndvi - lo) / (hi - lo), 0, 1)^2.
Raster compute_fvc(const Raster& ndvi, double ndvi_min, double ndvi_max);

/// Loads the role files, computes, and writes `out` (relative to the
/// workspace root). Returns the absolute output path.
std::filesystem::path compute_index_file(const Workspace& ws, IndexKind kind,
                                         const BandPaths& bands, const std::string& out,
                                         const IndexParams& params = {});

/// `<out_dir>/<kind>_<stem>.tif` for each item, where stem comes from the
/// first required role. A repeated stem gets `_<item index>` appended.
std::vector<std::string> batch_output_names(IndexKind kind, std::span<const BandPaths> items,
                                            const std::string& out_dir);

/// One output per item, in order. Throws Error{EmptyBatch} for an empty
/// list; the first failing item's error carries its index.
std::vector<std::filesystem::path> compute_batch_index(const Workspace& ws, IndexKind kind,
                                                       std::span<const BandPaths> items,
                                                       const std::string& out_dir,
                                                       const IndexParams& params = {});

/// 1 where value > threshold, 0 elsewhere (nodata included).
Raster frp_mask(const Raster& frp, double threshold);

std::vector<std::filesystem::path> compute_frp_masks(const Workspace& ws,
                                                     std::span<const std::string> paths,
                                                     double threshold,
                                                     const std::string& out_dir);

struct Edge {
    double slope = 0.0;
    double intercept = 0.0;
    double at(double x) const noexcept { return intercept + slope * x; }
};

struct TvdiResult {
    Raster tvdi;
    Edge dry;
    Edge wet;
    std::size_t bins_used = 0;
};

/// Dry and wet edges are least-squares lines through the per-bin
/// (NDVI, max LST) and (NDVI, min LST) points, where each point takes the
/// NDVI of the pixel holding the extreme. Bins with fewer than 3 pixels are
/// skipped. Output is clamped to [0, 1].
TvdiResult compute_tvdi(const Raster& ndvi, const Raster& lst, std::size_t bins = 20);

std::filesystem::path compute_tvdi_file(const Workspace& ws, const std::string& ndvi_path,
                                        const std::string& lst_path, const std::string& out,
                                        std::size_t bins = 20);

/// 100 * ones / valid pixels for a {0,1} or {0,255} map.
double extreme_snow_loss_percentage(const Raster& binary_map);

} // namespace geoagent::index
