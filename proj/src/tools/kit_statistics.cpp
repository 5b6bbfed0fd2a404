// SPDX-License-Identifier: Apache-2.0
#include "geoagent/stats/descriptive.hpp"
#include "geoagent/stats/landsat.hpp"
#include "geoagent/stats/threshold.hpp"
#include "geoagent/stats/utility.hpp"
#include "kit_util.hpp"

namespace geoagent::tools {

using namespace kit;
namespace st = geoagent::stats;

namespace {

const std::vector<std::string> kComparators{">", "<", ">=", "<="};
const std::vector<std::string> kSides{"above", "below"};

ParamSpec file_list() { return paths("file_list", "Raster paths"); }
ParamSpec side_param() {
    return optional(one_of(str("mode", "Compare strictly above or below"), kSides), "above");
}
ParamSpec comparator(std::string name) {
    return optional(one_of(str(std::move(name), "Comparison operator"), kComparators), ">");
}

st::Side side_arg(const Args& a) {
    return a.opt_str("mode").value_or("above") == "below" ? st::Side::Below : st::Side::Above;
}

st::Compare cmp_arg(const Args& a, std::string_view key) {
    return st::parse_comparator(a.opt_str(key).value_or(">"));
}

void add_scalar_stat(Registry& reg, std::string name, std::string desc, st::ScalarStat s) {
    reg.add(tool(std::move(name), "Statistics", std::move(desc), {numbers("data", "Sample values")}),
            [s](const Args& a, const ToolContext&) {
                const auto d = a.nums("data");
                return ToolResult::success(st::scalar_stat(d, s));
            });
}

void add_batch_stat(Registry& reg, st::ImageStat s, std::string desc) {
    reg.add(tool("calc_batch_image_" + std::string(st::image_stat_name(s)), "Statistics", std::move(desc),
                 {file_list(), band()}),
            [s](const Args& a, const ToolContext& ctx) {
                const auto files = a.strs("file_list");
                return ToolResult::success(st::batch_image_stat(ctx.ws(), files, s, a.band_or("band_index")));
            });
}

using Binary = double (*)(double, double);

void add_binary(Registry& reg, std::string name, std::string desc, std::string p1, std::string p2,
                Binary f) {
    reg.add(tool(std::move(name), "Statistics", std::move(desc),
                 {num(p1, "First operand"), num(p2, "Second operand")}),
            [f, p1, p2](const Args& a, const ToolContext&) {
                return ToolResult::success(f(a.num(p1), a.num(p2)));
            });
}

void add_unary(Registry& reg, std::string name, std::string desc, std::string p, double (*f)(double)) {
    reg.add(tool(std::move(name), "Statistics", std::move(desc), {num(p, "Input value")}),
            [f, p](const Args& a, const ToolContext&) { return ToolResult::success(f(a.num(p))); });
}

json value_index(const st::ValueIndex& v) { return {{"value", v.value}, {"index", v.index}}; }

std::vector<st::Condition> conditions_arg(const Args& a) {
    std::vector<st::Condition> out;
    const json& arr = a.raw("conditions");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& c = arr[i];
        const std::string where = "conditions element " + std::to_string(i);
        if (!c.is_object() || !c.contains("band") || !c.contains("comparator") || !c.contains("value"))
            throw Error(Errc::InvalidArgument, where + " needs band, comparator and value");
        if (!c["band"].is_number_integer() || c["band"].get<long long>() < 1)
            throw Error(Errc::InvalidArgument, where + ": band is a 1-based integer");
        if (!c["comparator"].is_string() || !c["value"].is_number())
            throw Error(Errc::InvalidArgument, where + ": comparator is a string, value a number");
        out.push_back({static_cast<std::size_t>(c["band"].get<long long>() - 1),
                       st::parse_comparator(c["comparator"].get<std::string>()), c["value"].get<double>()});
    }
    return out;
}

ParamSpec conditions_param() {
    return list("conditions", ParamType::Object,
                "Tests that must all hold, each {band (1-based), comparator, value}");
}

template <class F>
void add_raster_pair_out(Registry& reg, std::string name, std::string desc, F f) {
    reg.add(tool(std::move(name), "Statistics", std::move(desc),
                 {str("image_a_path", "First raster"), str("image_b_path", "Second raster"),
                  str("output_path", "Output GeoTIFF path")}),
            [f](const Args& a, const ToolContext& ctx) {
                const auto ra = ctx.ws().load(a.str("image_a_path"));
                const auto rb = ctx.ws().load(a.str("image_b_path"));
                return ToolResult::saved(ctx.ws().write(f(ra, rb), a.str("output_path")));
            });
}

} // namespace

void register_statistics_tools(Registry& reg) {
    add_scalar_stat(reg, "mean", "Arithmetic mean of a dataset.", st::ScalarStat::Mean);
    add_scalar_stat(reg, "coefficient_of_variation",
                    "Coefficient of variation: standard deviation divided by the mean.", st::ScalarStat::CV);
    add_scalar_stat(reg, "skewness", "Skewness of a dataset.", st::ScalarStat::Skewness);
    add_scalar_stat(reg, "kurtosis", "Excess kurtosis of a dataset.", st::ScalarStat::Kurtosis);

    add_batch_stat(reg, st::ImageStat::Mean, "Mean pixel value of each image in a batch.");
    add_batch_stat(reg, st::ImageStat::Std, "Pixel standard deviation of each image in a batch.");
    add_batch_stat(reg, st::ImageStat::Median, "Median pixel value of each image in a batch.");
    add_batch_stat(reg, st::ImageStat::Min, "Minimum pixel value of each image in a batch.");
    add_batch_stat(reg, st::ImageStat::Max, "Maximum pixel value of each image in a batch.");
    add_batch_stat(reg, st::ImageStat::Skewness, "Skewness of the pixel values of each image in a batch.");
    add_batch_stat(reg, st::ImageStat::Kurtosis,
                   "Excess kurtosis of the pixel values of each image in a batch.");
    add_batch_stat(reg, st::ImageStat::Sum, "Sum of pixel values of each image in a batch.");

    reg.add(tool("calc_batch_image_hotspot_percentage", "Statistics",
                 "Percentage of pixels above the threshold for each image in a batch.",
                 {file_list(), num("threshold", "Threshold"), band()}),
            [](const Args& a, const ToolContext& ctx) {
                const auto files = a.strs("file_list");
                return ToolResult::success(st::batch_hotspot_percentage(ctx.ws(), files, a.num("threshold"),
                                                                        a.band_or("band_index")));
            });
    reg.add(tool("calc_batch_image_hotspot_tif", "Statistics",
                 "Binary hotspot maps (1 where the pixel is below the threshold) for a batch of "
                 "images, saved as GeoTIFF.",
                 {file_list(), num("threshold", "Threshold"), str("output_dir", "Directory for the maps"),
                  band()}),
            [](const Args& a, const ToolContext& ctx) {
                const auto files = a.strs("file_list");
                return ToolResult::saved_many(st::batch_hotspot_tif(
                    ctx.ws(), files, a.num("threshold"), a.str("output_dir"), a.band_or("band_index")));
            });

    add_binary(reg, "difference", "Absolute difference between two numbers.", "a", "b",
               [](double x, double y) { return st::difference(x, y); });
    add_binary(reg, "division", "Divide a by b.", "a", "b",
               [](double x, double y) { return st::division(x, y); });
    add_binary(reg, "percentage_change", "Percentage change from old_value to new_value.", "old_value",
               "new_value", [](double x, double y) { return st::percentage_change(x, y); });
    add_binary(reg, "multiply", "Product of two numbers.", "a", "b",
               [](double x, double y) { return st::multiply(x, y); });
    add_unary(reg, "kelvin_to_celsius", "Convert Kelvin to Celsius.", "kelvin",
              [](double x) { return st::kelvin_to_celsius(x); });
    add_unary(reg, "celsius_to_kelvin", "Convert Celsius to Kelvin.", "celsius",
              [](double x) { return st::celsius_to_kelvin(x); });
    reg.add(tool("ceil_number", "Statistics", "Smallest integer not less than the number.",
                 {num("number", "Input value")}),
            [](const Args& a, const ToolContext&) {
                return ToolResult::success(static_cast<long long>(st::ceil_number(a.num("number"))));
            });
    reg.add(tool("max_value_and_index", "Statistics", "Maximum of a list and the index of its first occurrence.",
                 {numbers("values", "Input list")}),
            [](const Args& a, const ToolContext&) {
                const auto v = a.nums("values");
                return ToolResult::success(value_index(st::max_with_index(v)));
            });
    reg.add(tool("min_value_and_index", "Statistics", "Minimum of a list and the index of its first occurrence.",
                 {numbers("values", "Input list")}),
            [](const Args& a, const ToolContext&) {
                const auto v = a.nums("values");
                return ToolResult::success(value_index(st::min_with_index(v)));
            });
    reg.add(tool("get_list_object_via_indexes", "Statistics",
                 "Elements of a list at the given indexes; negative indexes count from the end.",
                 {param("input_list", ParamType::Array, "Source list"),
                  list("indexes", ParamType::Integer, "Positions to pick")}),
            [](const Args& a, const ToolContext&) {
                const json& src = a.raw("input_list");
                const std::vector<json> items(src.begin(), src.end());
                std::vector<long long> idx;
                for (const auto& v : a.raw("indexes"))
                    idx.push_back(v.is_number_integer() ? v.get<long long>()
                                                        : static_cast<long long>(v.get<double>()));
                return ToolResult::success(json(st::select_indexes<json>(items, idx)));
            });

    reg.add(tool("calculate_threshold_ratio", "Statistics",
                 "Average percentage of pixels above the threshold across the images.",
                 {file_list(), num("threshold", "Threshold"), band()}),
            [](const Args& a, const ToolContext& ctx) {
                const auto files = a.strs("file_list");
                return ToolResult::success(
                    st::threshold_ratio(ctx.ws(), files, a.num("threshold"), a.band_or("band_index")));
            });
    reg.add(tool("calc_batch_fire_pixels", "Statistics",
                 "Number of fire pixels (FRP > threshold) in each image of a batch.",
                 {file_list(), num("threshold", "FRP threshold"), band()}),
            [](const Args& a, const ToolContext& ctx) {
                const auto files = a.strs("file_list");
                return ToolResult::success(
                    st::batch_fire_pixels(ctx.ws(), files, a.num("threshold"), a.band_or("band_index")));
            });
    reg.add(tool("create_fire_increase_map", "Statistics",
                 "Binary map, 1 where after - before exceeds the threshold.",
                 {str("before_path", "Earlier raster"), str("after_path", "Later raster"),
                  num("threshold", "Minimum increase"), str("output_path", "Output GeoTIFF path")}),
            [](const Args& a, const ToolContext& ctx) {
                const auto b = ctx.ws().load(a.str("before_path"));
                const auto af = ctx.ws().load(a.str("after_path"));
                return ToolResult::saved(
                    ctx.ws().write(st::fire_increase_map(b, af, a.num("threshold")), a.str("output_path")));
            });
    reg.add(tool("identify_fire_prone_areas", "Statistics",
                 "Binary map, 1 where the hotspot frequency exceeds its own percentile value.",
                 {str("hotspot_map_path", "Hotspot frequency raster"), num("percentile", "Percentile in [0, 100]"),
                  str("output_path", "Output GeoTIFF path")}),
            [](const Args& a, const ToolContext& ctx) {
                const auto r = ctx.ws().load(a.str("hotspot_map_path"));
                return ToolResult::saved(
                    ctx.ws().write(st::fire_prone_areas(r, a.num("percentile")), a.str("output_path")));
            });
    reg.add(tool("get_percentile_value_from_image", "Statistics",
                 "Percentile of the valid pixel values of one band.",
                 {str("image_path", "Input raster"), num("percentile", "Percentile in [0, 100]"), band()}),
            [](const Args& a, const ToolContext& ctx) {
                return ToolResult::success(st::percentile_value(ctx.ws().load(a.str("image_path")),
                                                                a.num("percentile"), a.band_or("band_index")));
            });
    reg.add(tool("image_division_mean", "Statistics",
                 "Mean of the pixel-wise ratio of two images, or of two bands of one image.",
                 {str("image_a_path", "Numerator raster"),
                  optional(str("image_b_path", "Denominator raster, default the numerator raster")),
                  band("band_a_index"), band("band_b_index")}),
            [](const Args& a, const ToolContext& ctx) {
                const auto ra = ctx.ws().load(a.str("image_a_path"));
                const auto bpath = a.opt_str("image_b_path");
                const auto rb = bpath ? ctx.ws().load(*bpath) : ra;
                return ToolResult::success(st::image_division_mean(ra, a.band_or("band_a_index"), rb,
                                                                   a.band_or("band_b_index")));
            });
    reg.add(tool("calculate_intersection_percentage", "Statistics",
                 "Percentage of pixels where image A and image B both pass their threshold tests.",
                 {str("image_a_path", "First raster"), num("threshold_a", "Threshold for image A"),
                  str("image_b_path", "Second raster"), num("threshold_b", "Threshold for image B"),
                  comparator("comparator_a"), comparator("comparator_b")}),
            [](const Args& a, const ToolContext& ctx) {
                const auto ra = ctx.ws().load(a.str("image_a_path"));
                const auto rb = ctx.ws().load(a.str("image_b_path"));
                return ToolResult::success(st::intersection_percentage(
                    ra, cmp_arg(a, "comparator_a"), a.num("threshold_a"), rb, cmp_arg(a, "comparator_b"),
                    a.num("threshold_b")));
            });

    reg.add(tool("calc_batch_image_mean_mean", "Statistics", "Average of the per-image mean values.",
                 {file_list(), band()}),
            [](const Args& a, const ToolContext& ctx) {
                const auto files = a.strs("file_list");
                return ToolResult::success(st::batch_mean_of_means(ctx.ws(), files, a.band_or("band_index")));
            });
    reg.add(tool("calc_batch_image_mean_max", "Statistics", "Largest of the per-image mean values.",
                 {file_list(), band()}),
            [](const Args& a, const ToolContext& ctx) {
                const auto files = a.strs("file_list");
                return ToolResult::success(st::batch_max_of_means(ctx.ws(), files, a.band_or("band_index")));
            });
    reg.add(tool("calc_batch_image_mean_max_min", "Statistics",
                 "Mean of the per-image means, maximum of the maxima and minimum of the minima.",
                 {file_list(), band()}),
            [](const Args& a, const ToolContext& ctx) {
                const auto files = a.strs("file_list");
                const auto m = st::batch_mean_max_min(ctx.ws(), files, a.band_or("band_index"));
                return ToolResult::success(
                    {{"mean", m.mean_of_means}, {"max", m.max_of_maxes}, {"min", m.min_of_mins}});
            });
    reg.add(tool("calc_batch_image_mean_threshold", "Statistics",
                 "Count or percentage of images whose mean lies above or below the threshold.",
                 {file_list(), num("threshold", "Threshold"), side_param(),
                  optional(one_of(str("return_type", "What to report"), {"count", "percentage"}), "count"),
                  band()}),
            [](const Args& a, const ToolContext& ctx) {
                const auto files = a.strs("file_list");
                const auto r = st::images_mean_vs_threshold(ctx.ws(), files, a.num("threshold"), side_arg(a),
                                                            a.band_or("band_index"));
                if (a.opt_str("return_type").value_or("count") == "percentage")
                    return ToolResult::success(r.percentage);
                return ToolResult::success(r.count);
            });
    reg.add(tool("calculate_multi_band_threshold_ratio", "Statistics",
                 "Percentage of pixels satisfying every band condition.",
                 {str("image_path", "Multi-band raster"), conditions_param()}),
            [](const Args& a, const ToolContext& ctx) {
                const auto c = conditions_arg(a);
                return ToolResult::success(st::count_conditions(ctx.ws().load(a.str("image_path")), c).percentage());
            });
    reg.add(tool("count_pixels_satisfying_conditions", "Statistics",
                 "Number of pixels satisfying every band condition.",
                 {str("image_path", "Multi-band raster"), conditions_param()}),
            [](const Args& a, const ToolContext& ctx) {
                const auto c = conditions_arg(a);
                return ToolResult::success(st::count_conditions(ctx.ws().load(a.str("image_path")), c).selected);
            });
    reg.add(tool("count_images_exceeding_threshold_ratio", "Statistics",
                 "Number of images whose share of pixels above or below value_threshold exceeds "
                 "ratio_threshold percent.",
                 {file_list(), num("value_threshold", "Pixel threshold"),
                  num("ratio_threshold", "Percentage an image must exceed"), side_param(), band()}),
            [](const Args& a, const ToolContext& ctx) {
                const auto files = a.strs("file_list");
                return ToolResult::success(st::count_images_exceeding_ratio(
                    ctx.ws(), files, a.num("value_threshold"), a.num("ratio_threshold"), side_arg(a),
                    a.band_or("band_index")));
            });
    reg.add(tool("average_ratio_exceeding_threshold", "Statistics",
                 "Average percentage of pixels above value_threshold over the images where that "
                 "percentage exceeds ratio_threshold.",
                 {file_list(), num("value_threshold", "Pixel threshold"),
                  num("ratio_threshold", "Percentage an image must exceed"), band()}),
            [](const Args& a, const ToolContext& ctx) {
                const auto files = a.strs("file_list");
                return ToolResult::success(st::average_ratio_exceeding(
                    ctx.ws(), files, a.num("value_threshold"), a.num("ratio_threshold"), a.band_or("band_index")));
            });
    reg.add(tool("count_images_exceeding_mean_multiplier", "Statistics",
                 "Number of images whose mean lies above or below multiplier times the mean of all "
                 "image means.",
                 {file_list(), num("multiplier", "Factor applied to the overall mean"), side_param(), band()}),
            [](const Args& a, const ToolContext& ctx) {
                const auto files = a.strs("file_list");
                return ToolResult::success(st::count_images_vs_mean_multiplier(
                    ctx.ws(), files, a.num("multiplier"), side_arg(a), a.band_or("band_index")));
            });
    reg.add(tool("calculate_band_mean_by_condition", "Statistics",
                 "Mean of a target band over pixels where a condition band passes a threshold test.",
                 {str("target_path", "Raster holding the target band"),
                  str("condition_path", "Raster holding the condition band"), num("threshold", "Threshold"),
                  comparator("comparator"), band("target_band_index"), band("condition_band_index")}),
            [](const Args& a, const ToolContext& ctx) {
                const auto t = ctx.ws().load(a.str("target_path"));
                const auto c = ctx.ws().load(a.str("condition_path"));
                return ToolResult::success(st::band_mean_by_condition(
                    t, a.band_or("target_band_index"), c, a.band_or("condition_band_index"),
                    cmp_arg(a, "comparator"), a.num("threshold")));
            });
    reg.add(tool("calc_threshold_value_mean", "Statistics",
                 "Mean of path2 pixels where path1 exceeds the threshold.",
                 {str("path1", "Gate raster"), str("path2", "Value raster"), num("threshold", "Threshold")}),
            [](const Args& a, const ToolContext& ctx) {
                const auto g = ctx.ws().load(a.str("path1"));
                const auto v = ctx.ws().load(a.str("path2"));
                return ToolResult::success(st::threshold_value_mean(g, v, a.num("threshold")));
            });

    add_raster_pair_out(reg, "calculate_tif_difference", "Pixel-wise image_b - image_a, saved as GeoTIFF.",
                        [](const raster::Raster& x, const raster::Raster& y) { return st::tif_difference(x, y); });
    add_raster_pair_out(reg, "subtract", "Pixel-wise image_a - image_b, saved as GeoTIFF.",
                        [](const raster::Raster& x, const raster::Raster& y) { return st::subtract(x, y); });

    reg.add(tool("calculate_area", "Statistics", "Area of the non-zero pixels of an image.",
                 {str("image_path", "Input raster"),
                  optional(num("pixel_area", "Area of one pixel"), 1.0), band()}),
            [](const Args& a, const ToolContext& ctx) {
                const double px = a.num_or("pixel_area", 1.0);
                const auto n = st::nonzero_area(ctx.ws().load(a.str("image_path")), a.band_or("band_index"));
                return ToolResult::success(double(n) * px);
            });
    reg.add(tool("grayscale_to_colormap", "Statistics", "Apply a colormap to a grayscale image and save it.",
                 {str("image_path", "Single-band raster"), str("output_path", "Output GeoTIFF path")}),
            [](const Args& a, const ToolContext& ctx) {
                const auto r = ctx.ws().load(a.str("image_path"));
                return ToolResult::saved(ctx.ws().write(st::grayscale_to_colormap(r), a.str("output_path")));
            });
    reg.add(tool("get_filelist", "Statistics", "Sorted names of the files in a directory.",
                 {str("dir_path", "Directory"), optional(str("pattern", "Glob filter such as *.tif"))}),
            [](const Args& a, const ToolContext& ctx) {
                return ToolResult::success(st::get_filelist(ctx.ws(), a.str("dir_path"), a.opt_str("pattern")));
            });
    reg.add(tool("radiometric_correction_sr", "Statistics",
                 "Landsat 8 Collection 2 surface reflectance scaling of an SR_B* band.",
                 {str("band_path", "SR band (uint16 DN)"), str("output_path", "Output GeoTIFF path")}),
            [](const Args& a, const ToolContext& ctx) {
                const auto r = ctx.ws().load(a.str("band_path"));
                return ToolResult::saved(ctx.ws().write(st::radiometric_correction_sr(r), a.str("output_path")));
            });
    reg.add(tool("apply_cloud_mask", "Statistics",
                 "Mask cloud, cirrus and shadow pixels of a Landsat 8 band using QA_PIXEL.",
                 {str("band_path", "Band to mask"), str("qa_pixel_path", "QA_PIXEL raster (uint16)"),
                  str("output_path", "Output GeoTIFF path")}),
            [](const Args& a, const ToolContext& ctx) {
                const auto b = ctx.ws().load(a.str("band_path"));
                const auto q = ctx.ws().load(a.str("qa_pixel_path"));
                return ToolResult::saved(ctx.ws().write(st::apply_cloud_mask(b, q), a.str("output_path")));
            });
}

} // namespace geoagent::tools
