// SPDX-License-Identifier: Apache-2.0
#include <deque>

#include "geoagent/inversion/inversion.hpp"
#include "kit_util.hpp"

namespace geoagent::tools {

using namespace kit;
namespace inv = geoagent::inversion;

namespace {

/// Loaded rasters keyed by input role; owns the storage the Inputs map
/// points into.
struct Loaded {
    std::deque<raster::Raster> store;
    inv::Inputs inputs;

    void add(const raster::Workspace& ws, const std::string& role, const std::string& path) {
        store.push_back(ws.load(path));
        inputs[role] = &store.back();
    }
};

/// Optional numeric overrides present in the call.
inv::Coefficients overrides(const Args& a, std::initializer_list<const char*> keys) {
    inv::Coefficients c;
    for (const char* k : keys)
        if (a.has(k)) c[k] = a.num(k);
    return c;
}

using RoleMap = std::vector<std::pair<std::string, std::string>>;  // role, param

void add_lst(Registry& reg, std::string name, std::string desc, inv::LstMethod m, RoleMap roles) {
    std::vector<ParamSpec> params;
    for (const auto& [role, p] : roles) params.push_back(str(p, role + " brightness temperature raster"));
    params.push_back(str("output_path", "Output GeoTIFF path"));
    reg.add(tool(std::move(name), "Inversion", std::move(desc), std::move(params)),
            [m, roles](const Args& a, const ToolContext& ctx) {
                Loaded in;
                for (const auto& [role, p] : roles) in.add(ctx.ws(), role, a.str(p));
                const auto res = inv::lst_estimate(m, in.inputs);
                return ToolResult::saved(ctx.ws().write(res.lst, a.str("output_path")));
            });
}

void add_lst_by_ndvi(Registry& reg, std::string name, std::string desc, inv::LstStat stat) {
    reg.add(tool(std::move(name), "Inversion", std::move(desc),
                 {paths("lst_paths", "LST rasters"),
                  paths("ndvi_paths", "NDVI rasters, paired with lst_paths"),
                  num("ndvi_threshold", "NDVI threshold"),
                  optional(one_of(str("mode", "Select pixels strictly above or below"), {"above", "below"}),
                           "above")}),
            [stat](const Args& a, const ToolContext& ctx) {
                const auto lst = a.strs("lst_paths");
                const auto ndvi = a.strs("ndvi_paths");
                require_same_length(lst.size(), ndvi.size(), "lst_paths / ndvi_paths");
                const auto dir = a.opt_str("mode").value_or("above") == "below"
                                     ? inv::Direction::Below
                                     : inv::Direction::Above;
                return ToolResult::success(
                    inv::lst_stat_by_ndvi(ctx.ws(), stat, lst, ndvi, a.num("ndvi_threshold"), dir));
            });
}

void add_microwave(Registry& reg, std::string name, std::string desc, inv::MicrowaveMethod m,
                   RoleMap roles, std::vector<ParamSpec> coeffs,
                   std::initializer_list<const char*> coeff_keys) {
    std::vector<ParamSpec> params;
    for (const auto& [role, p] : roles) params.push_back(str(p, role + " raster"));
    params.push_back(str("output_path", "Output GeoTIFF path"));
    for (auto& c : coeffs) params.push_back(std::move(c));
    std::vector<std::string> keys(coeff_keys.begin(), coeff_keys.end());
    reg.add(tool(std::move(name), "Inversion", std::move(desc), std::move(params)),
            [m, roles, keys](const Args& a, const ToolContext& ctx) {
                Loaded in;
                for (const auto& [role, p] : roles) in.add(ctx.ws(), role, a.str(p));
                inv::Coefficients c;
                for (const auto& k : keys)
                    if (a.has(k)) c[k] = a.num(k);
                return ToolResult::saved(
                    ctx.ws().write(inv::microwave_invert(m, in.inputs, c), a.str("output_path")));
            });
}

std::vector<ParamSpec> linear_coeffs() {
    return {optional(num("alpha", "Gain of the linear model"), 1.0),
            optional(num("beta", "Offset of the linear model"), 0.0)};
}

} // namespace

void register_inversion_tools(Registry& reg) {
    reg.add(tool("band_ratio", "Inversion",
                 "Precipitable water vapour from a water-absorption band and a window band by "
                 "the band ratio method.",
                 {str("absorption_path", "Water vapour absorption band raster"),
                  str("window_path", "Atmospheric window band raster"),
                  str("output_path", "Output GeoTIFF path"),
                  optional(num("alpha", "Ratio model offset"), 0.02),
                  optional(num("beta", "Ratio model slope"), 0.651)}),
            [](const Args& a, const ToolContext& ctx) {
                const auto abs = ctx.ws().load(a.str("absorption_path"));
                const auto win = ctx.ws().load(a.str("window_path"));
                return ToolResult::saved(ctx.ws().write(
                    inv::pwv_band_ratio(abs, win, overrides(a, {"alpha", "beta"})),
                    a.str("output_path")));
            });

    add_lst(reg, "lst_single_channel",
            "Land surface temperature by the single-channel method with NDVI-based emissivity "
            "from red and NIR bands.",
            inv::LstMethod::SingleChannel, {{"bt", "bt_path"}, {"red", "red_path"}, {"nir", "nir_path"}});
    add_lst(reg, "lst_multi_channel",
            "Land surface temperature by the multi-channel algorithm from two thermal bands.",
            inv::LstMethod::MultiChannel, {{"band31", "band31_path"}, {"band32", "band32_path"}});
    add_lst(reg, "split_window",
            "Land surface temperature by the split-window algorithm from two thermal bands.",
            inv::LstMethod::SplitWindow, {{"band31", "band31_path"}, {"band32", "band32_path"}});
    add_lst(reg, "modis_day_night_lst",
            "Day and night land surface temperature from MODIS brightness temperatures "
            "(output band 1 day, band 2 night).",
            inv::LstMethod::ModisDayNight, {{"day", "day_bt_path"}, {"night", "night_bt_path"}});
    add_lst(reg, "ttm_lst",
            "Land surface temperature by the three-temperature method from three thermal bands.",
            inv::LstMethod::TTM,
            {{"band1", "band1_path"}, {"band2", "band2_path"}, {"band3", "band3_path"}});

    reg.add(tool("temperature_emissivity_separation", "Inversion",
                 "Land surface temperature by temperature emissivity separation over 3 or 5 "
                 "thermal bands.",
                 {paths("tir_band_paths", "Thermal band rasters, shortest wavelength first"),
                  str("output_path", "Output GeoTIFF path")}),
            [](const Args& a, const ToolContext& ctx) {
                const auto bands = a.strs("tir_band_paths");
                Loaded in;
                for (std::size_t i = 0; i < bands.size(); ++i)
                    in.add(ctx.ws(), "band" + std::to_string(i + 1), bands[i]);
                const auto res = inv::lst_estimate(inv::LstMethod::TES, in.inputs);
                return ToolResult::saved(ctx.ws().write(res.lst, a.str("output_path")));
            });

    add_lst_by_ndvi(reg, "calculate_mean_lst_by_ndvi",
                    "Mean land surface temperature over pixels whose NDVI is above or below a "
                    "threshold, pooled across images.",
                    inv::LstStat::Mean);
    add_lst_by_ndvi(reg, "calculate_max_lst_by_ndvi",
                    "Maximum land surface temperature over pixels whose NDVI is above or below a "
                    "threshold, across images.",
                    inv::LstStat::Max);

    reg.add(tool("ATI", "Inversion",
                 "Apparent thermal inertia (1 - albedo) / (day_temp - night_temp).",
                 {str("albedo_path", "Albedo raster"), str("day_temp_path", "Daytime temperature raster"),
                  str("night_temp_path", "Night-time temperature raster"),
                  str("output_path", "Output GeoTIFF path")}),
            [](const Args& a, const ToolContext& ctx) {
                const auto al = ctx.ws().load(a.str("albedo_path"));
                const auto day = ctx.ws().load(a.str("day_temp_path"));
                const auto night = ctx.ws().load(a.str("night_temp_path"));
                return ToolResult::saved(ctx.ws().write(inv::ati(al, day, night), a.str("output_path")));
            });

    add_microwave(reg, "dual_polarization_differential",
                  "Dual-polarization differential method: alpha * (V - H) + beta.",
                  inv::MicrowaveMethod::DPDM, {{"v", "v_path"}, {"h", "h_path"}}, linear_coeffs(),
                  {"alpha", "beta"});
    {
        auto coeffs = linear_coeffs();
        coeffs.insert(coeffs.begin(),
                      optional(one_of(str("param_type", "Target parameter"), {"SM", "VI", "LAI"}), "SM"));
        add_microwave(reg, "dual_frequency_diff",
                      "Dual-frequency differential method: alpha * (band1 - band2) + beta for soil "
                      "moisture, vegetation index or LAI.",
                      inv::MicrowaveMethod::DualFreqDiff, {{"band1", "band1_path"}, {"band2", "band2_path"}},
                      std::move(coeffs), {"alpha", "beta"});
    }
    reg.add(tool("multi_freq_bt", "Inversion",
                 "Multi-frequency brightness temperature method: weighted sum of bands plus offset.",
                 {paths("band_paths", "Brightness temperature rasters"),
                  str("output_path", "Output GeoTIFF path"),
                  optional(numbers("weights", "One weight per band, default equal weights")),
                  optional(num("beta", "Offset"), 0.0)}),
            [](const Args& a, const ToolContext& ctx) {
                const auto bands = a.strs("band_paths");
                Loaded in;
                for (std::size_t i = 0; i < bands.size(); ++i)
                    in.add(ctx.ws(), "band" + std::to_string(i + 1), bands[i]);
                inv::Coefficients c = overrides(a, {"beta"});
                if (a.has("weights")) {
                    const auto w = a.nums("weights");
                    require_same_length(bands.size(), w.size(), "band_paths / weights");
                    for (std::size_t i = 0; i < w.size(); ++i) c["w" + std::to_string(i + 1)] = w[i];
                }
                return ToolResult::saved(ctx.ws().write(
                    inv::microwave_invert(inv::MicrowaveMethod::MultiFreqBT, in.inputs, c),
                    a.str("output_path")));
            });
    add_microwave(reg, "chang_single_param_inversion",
                  "Chang algorithm: k * (TB18H - TB37H), e.g. snow depth.",
                  inv::MicrowaveMethod::Chang, {{"18h", "band18h_path"}, {"37h", "band37h_path"}},
                  {optional(num("k", "Gain"), 1.59)}, {"k"});
    add_microwave(reg, "nasa_team_sea_ice_concentration",
                  "Sea ice concentration (percent) by the NASA Team algorithm from 19H, 19V and 37V "
                  "brightness temperatures.",
                  inv::MicrowaveMethod::NasaTeamSIC,
                  {{"19h", "band19h_path"}, {"19v", "band19v_path"}, {"37v", "band37v_path"}}, {}, {});
    add_microwave(reg, "dual_polarization_ratio",
                  "Polarization ratio (V - H) / (V + H), mapped linearly by alpha and beta.",
                  inv::MicrowaveMethod::PolarizationRatio, {{"v", "v_path"}, {"h", "h_path"}},
                  linear_coeffs(), {"alpha", "beta"});

    reg.add(tool("calculate_water_turbidity_ntu", "Inversion",
                 "Water turbidity in NTU from red band reflectance.",
                 {str("red_path", "Red band reflectance raster"), str("output_path", "Output GeoTIFF path")}),
            [](const Args& a, const ToolContext& ctx) {
                return ToolResult::saved(ctx.ws().write(
                    inv::turbidity_ntu(ctx.ws().load(a.str("red_path"))), a.str("output_path")));
            });
}

} // namespace geoagent::tools
