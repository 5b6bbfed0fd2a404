// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geoagent/raster/raster.hpp"
#include "geoagent/raster/workspace.hpp"

namespace geoagent::inversion {

using raster::Raster;
using raster::Workspace;

enum class LstMethod { SingleChannel, MultiChannel, SplitWindow, TES, ModisDayNight, TTM };
enum class MicrowaveMethod { DPDM, DualFreqDiff, MultiFreqBT, Chang, PolarizationRatio, NasaTeamSIC };

/// Named input rasters ("band31", "v", "19h", ...).
using Inputs = std::map<std::string, const Raster*>;

/// Flat coefficient overrides. Keys a method does not know are rejected.
using Coefficients = std::map<std::string, double>;

std::string_view method_name(LstMethod m) noexcept;
std::string_view method_name(MicrowaveMethod m) noexcept;

/// Input names a method reads. Methods taking a variable band count
/// (TES, MultiFreqBT) report the minimum set.
std::vector<std::string> required_roles(LstMethod m);
std::vector<std::string> required_roles(MicrowaveMethod m);

/// Coefficient names a method accepts, with their defaults.
Coefficients default_coefficients(LstMethod m, std::size_t band_count = 0);
Coefficients default_coefficients(MicrowaveMethod m, std::size_t band_count = 0);

// Planck helpers, wavelength in micrometres, radiance in W m^-2 sr^-1 um^-1.
double planck_radiance(double wavelength_um, double kelvin) noexcept;
double brightness_temperature(double wavelength_um, double radiance) noexcept;

struct LstResult {
    Raster lst;                    // Kelvin, f32. ModisDayNight: band 0 day, band 1 night.
    std::size_t nonconverged = 0;  // TES and TTM pixels that hit the iteration cap
};

LstResult lst_estimate(LstMethod method, const Inputs& inputs, const Coefficients& coeffs = {});

/// Emissivity from NDVI thresholds: soil value below `ndvi_soil`, vegetation
/// value above `ndvi_veg`, FVC-weighted blend between.
double ndvi_emissivity(double ndvi, double ndvi_soil = 0.2, double ndvi_veg = 0.5,
                       double emis_soil = 0.973, double emis_veg = 0.986) noexcept;

/// (1 - albedo) / (day - night); a non-positive difference gives nodata.
Raster ati(const Raster& albedo, const Raster& day, const Raster& night);

Raster microwave_invert(MicrowaveMethod method, const Inputs& inputs,
                        const Coefficients& coeffs = {});

/// PWV = ((alpha - ln tau) / beta)^2 with tau = absorption / window; the
/// numerator is floored at 0. tau <= 0 or window == 0 gives nodata.
Raster pwv_band_ratio(const Raster& absorption, const Raster& window,
                      const Coefficients& coeffs = {});

/// NTU = A * rho / (1 - rho / C); rho outside [0, C) gives nodata.
Raster turbidity_ntu(const Raster& red, const Coefficients& coeffs = {});

enum class LstStat { Mean, Max };
enum class Direction { Above, Below };

/// Mean or max LST over pixels whose NDVI is strictly above / below the
/// threshold, pooled across every (lst, ndvi) pair.
double lst_stat_by_ndvi(LstStat stat, std::span<const Raster> lst, std::span<const Raster> ndvi,
                        double threshold, Direction dir);

double lst_stat_by_ndvi(const Workspace& ws, LstStat stat, std::span<const std::string> lst_paths,
                        std::span<const std::string> ndvi_paths, double threshold, Direction dir);

} // namespace geoagent::inversion
