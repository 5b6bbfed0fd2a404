// SPDX-License-Identifier: Apache-2.0
#include "geoagent/index/index.hpp"
#include "kit_util.hpp"

namespace geoagent::tools {

using namespace kit;
namespace ix = geoagent::index;

namespace {

std::string role_param(ix::BandRole r) {
    switch (r) {
    case ix::BandRole::Blue: return "blue_paths";
    case ix::BandRole::Green: return "green_paths";
    case ix::BandRole::Red: return "red_paths";
    case ix::BandRole::NIR: return "nir_paths";
    case ix::BandRole::SWIR: return "swir_paths";
    }
    return "?";
}

std::string upper(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

void add_batch_index(Registry& reg, ix::IndexKind kind) {
    const auto roles = ix::required_roles(kind);
    std::vector<ParamSpec> params;
    std::string role_list;
    for (ix::BandRole r : roles) {
        const std::string role = upper(ix::role_name(r));
        params.push_back(paths(role_param(r), role + " band raster paths, one per scene"));
        role_list += (role_list.empty() ? "" : "/") + role;
    }
    params.push_back(str("output_dir", "Directory for the results, relative to the workspace"));
    const std::string name = "calculate_batch_" + std::string(ix::kind_name(kind));
    reg.add(tool(name, "Index",
                 "Batch-calculate " + upper(ix::kind_name(kind)) + " from " + role_list +
                     " raster files and save one GeoTIFF per scene.",
                 std::move(params)),
            [kind, roles](const Args& a, const ToolContext& ctx) {
                std::vector<std::vector<std::string>> cols;
                for (ix::BandRole r : roles) cols.push_back(a.strs(role_param(r)));
                for (std::size_t i = 1; i < cols.size(); ++i)
                    require_same_length(cols[0].size(), cols[i].size(),
                                        role_param(roles[0]) + " / " + role_param(roles[i]));
                std::vector<ix::BandPaths> items(cols[0].size());
                for (std::size_t i = 0; i < items.size(); ++i)
                    for (std::size_t k = 0; k < roles.size(); ++k) items[i][roles[k]] = cols[k][i];
                return ToolResult::saved_many(
                    ix::compute_batch_index(ctx.ws(), kind, items, a.str("output_dir")));
            });
}

} // namespace

void register_index_tools(Registry& reg) {
    for (ix::IndexKind k : ix::kAllKinds) add_batch_index(reg, k);

    reg.add(tool("calculate_batch_frp", "Index",
                 "Batch-calculate fire radiative power masks (1 where FRP > threshold) and save "
                 "one GeoTIFF per input.",
                 {paths("input_paths", "FRP raster paths"),
                  num("threshold", "FRP threshold"),
                  str("output_dir", "Directory for the masks")}),
            [](const Args& a, const ToolContext& ctx) {
                const auto in = a.strs("input_paths");
                return ToolResult::saved_many(
                    ix::compute_frp_masks(ctx.ws(), in, a.num("threshold"), a.str("output_dir")));
            });

    reg.add(tool("calc_extreme_snow_loss_percentage_from_binary_map", "Index",
                 "Percentage of extreme snow and ice loss pixels in a binary map.",
                 {str("binary_map_path", "Binary {0,1} or {0,255} raster")}),
            [](const Args& a, const ToolContext& ctx) {
                return ToolResult::success(
                    ix::extreme_snow_loss_percentage(ctx.ws().load(a.str("binary_map_path"))));
            });

    reg.add(tool("compute_tvdi", "Index",
                 "Compute the Temperature Vegetation Dryness Index from NDVI and LST rasters.",
                 {str("ndvi_path", "NDVI raster"), str("lst_path", "LST raster"),
                  str("output_path", "Output GeoTIFF path"),
                  optional(integer("n_bins", "Number of NDVI bins for edge fitting"), 20)}),
            [](const Args& a, const ToolContext& ctx) {
                const long long bins = a.integer_or("n_bins", 20);
                if (bins < 2) throw Error(Errc::InvalidArgument, "n_bins must be at least 2");
                return ToolResult::saved(ix::compute_tvdi_file(
                    ctx.ws(), a.str("ndvi_path"), a.str("lst_path"), a.str("output_path"),
                    static_cast<std::size_t>(bins)));
            });
}

} // namespace geoagent::tools
