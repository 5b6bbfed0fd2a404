// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "geoagent/analysis/acf.hpp"
#include "geoagent/analysis/changepoint.hpp"
#include "geoagent/analysis/spatial.hpp"
#include "geoagent/analysis/stl.hpp"
#include "geoagent/analysis/trend.hpp"
#include "kit_util.hpp"

namespace geoagent::tools {

using namespace kit;
namespace an = geoagent::analysis;

namespace {

an::Series series_arg(const Args& a) {
    an::Series s{a.nums("values"), {}};
    if (a.has("timestamps")) {
        s.timestamps = a.nums("timestamps");
        require_same_length(s.values.size(), s.timestamps.size(), "values / timestamps");
    }
    return s;
}

std::size_t count_arg(const Args& a, std::string_view key, long long fallback) {
    const long long v = a.integer_or(key, fallback);
    if (v < 0) throw Error(Errc::InvalidArgument, std::string(key) + " must be non-negative");
    return static_cast<std::size_t>(v);
}

/// 2 ln(n) times the sample variance; a flat series gets 1 (no split can
/// lower its zero cost).
double default_penalty(std::span<const double> y) {
    const double n = static_cast<double>(y.size());
    double mean = 0;
    for (double v : y) mean += v;
    mean /= n;
    double ss = 0;
    for (double v : y) ss += (v - mean) * (v - mean);
    const double var = ss / n;
    return var > 0 ? 2.0 * std::log(n) * var : 1.0;
}

const ParamSpec kValues = series("values", "Time series; null marks a missing sample");

} // namespace

void register_analysis_tools(Registry& reg) {
    reg.add(tool("compute_linear_trend", "Analysis",
                 "Least-squares line y = slope * x + intercept through a time series.",
                 {kValues, optional(numbers("timestamps", "Sample positions, default 0..n-1"))}),
            [](const Args& a, const ToolContext&) {
                const auto fit = an::linear_trend(series_arg(a));
                return ToolResult::success(
                    {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}});
            });
    reg.add(tool("mann_kendall_test", "Analysis",
                 "Two-sided Mann-Kendall monotonic trend test with Sen's slope.",
                 {kValues, optional(num("alpha", "Significance level"), 0.05)}),
            [](const Args& a, const ToolContext&) {
                const double alpha = a.num_or("alpha", 0.05);
                if (!(alpha > 0 && alpha < 1)) throw Error(Errc::InvalidArgument, "alpha must lie in (0, 1)");
                const auto mk = an::mann_kendall(series_arg(a), alpha);
                return ToolResult::success({{"trend", an::trend_name(mk.trend)},
                                            {"s", mk.s},
                                            {"variance", mk.variance},
                                            {"z", mk.z},
                                            {"p_value", mk.p_value},
                                            {"tau", mk.tau},
                                            {"slope", mk.slope},
                                            {"intercept", mk.intercept}});
            });
    reg.add(tool("sens_slope", "Analysis", "Sen's slope: median of all pairwise slopes.",
                 {kValues, optional(numbers("timestamps", "Sample positions, default 0..n-1"))}),
            [](const Args& a, const ToolContext&) {
                return ToolResult::success(an::sens_slope(series_arg(a)));
            });
    reg.add(tool("stl_decompose", "Analysis",
                 "Seasonal-trend decomposition by LOESS into trend, seasonal and residual parts.",
                 {kValues, integer("period", "Samples per seasonal cycle")}),
            [](const Args& a, const ToolContext&) {
                const auto y = a.nums("values");
                const auto res = an::stl_decompose(y, count_arg(a, "period", 0));
                return ToolResult::success(
                    {{"trend", res.trend}, {"seasonal", res.seasonal}, {"residual", res.residual}});
            });
    reg.add(tool("detect_change_points", "Analysis",
                 "Change points of a time series by exact penalized segmentation (PELT, L2 cost). "
                 "Returns the start index of each new segment.",
                 {kValues, optional(num("penalty", "Cost per change point, default 2 ln(n) var(y)"))}),
            [](const Args& a, const ToolContext&) {
                const auto y = a.nums("values");
                const double pen = a.has("penalty") ? a.num("penalty")
                                   : y.empty()      ? 1.0
                                                    : default_penalty(y);
                return ToolResult::success(an::detect_change_points(y, pen).breakpoints);
            });
    reg.add(tool("autocorrelation_function", "Analysis",
                 "Autocorrelation of a time series for lags 0..max_lag.",
                 {kValues, integer("max_lag", "Largest lag")}),
            [](const Args& a, const ToolContext&) {
                const auto y = a.nums("values");
                return ToolResult::success(an::acf(y, count_arg(a, "max_lag", 0)));
            });
    reg.add(tool("detect_seasonality_acf", "Analysis",
                 "Dominant period: first significant local ACF peak at lag 2 or more.",
                 {kValues, optional(integer("max_lag", "Largest lag searched, default n/2"))}),
            [](const Args& a, const ToolContext&) {
                const auto y = a.nums("values");
                const auto s = an::detect_seasonality_acf(y, count_arg(a, "max_lag", 0));
                return ToolResult::success({{"period", s.period ? json(*s.period) : json(nullptr)},
                                            {"strength", s.strength},
                                            {"threshold", s.threshold}});
            });
    reg.add(tool("getis_ord_gi_star", "Analysis",
                 "Getis-Ord Gi* z-scores over a square window; high values mark hot spots.",
                 {str("image_path", "Input raster"), str("output_path", "Output GeoTIFF path"),
                  optional(integer("kernel_radius", "Window half-size in pixels"), 1)}),
            [](const Args& a, const ToolContext& ctx) {
                const std::size_t radius = count_arg(a, "kernel_radius", 1);
                if (radius == 0) throw Error(Errc::InvalidArgument, "kernel_radius must be at least 1");
                const auto r = ctx.ws().load(a.str("image_path"));
                return ToolResult::saved(ctx.ws().write(an::getis_ord_gi_star(r, radius), a.str("output_path")));
            });
    reg.add(tool("analyze_hotspot_direction", "Analysis",
                 "Dominant cardinal direction of hotspot pixels (value 1) relative to the image "
                 "centre.",
                 {str("hotspot_map_path", "Binary hotspot map")}),
            [](const Args& a, const ToolContext& ctx) {
                const auto d = an::hotspot_direction(ctx.ws().load(a.str("hotspot_map_path")));
                return ToolResult::success(
                    {{"dominant", an::direction_name(d.dominant)},
                     {"counts",
                      {{"North", d.counts[0]}, {"East", d.counts[1]}, {"South", d.counts[2]}, {"West", d.counts[3]}}},
                     {"total", d.total}});
            });
    reg.add(tool("count_spikes_from_values", "Analysis",
                 "Number of rises between consecutive valid values larger than the threshold.",
                 {kValues, num("threshold", "Minimum rise")}),
            [](const Args& a, const ToolContext&) {
                const auto y = a.nums("values");
                return ToolResult::success(an::count_spikes(y, a.num("threshold")));
            });
}

} // namespace geoagent::tools
