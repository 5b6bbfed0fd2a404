// SPDX-License-Identifier: Apache-2.0
#include "geoagent/stats/threshold.hpp"

#include <algorithm>
#include <cmath>

#include "geoagent/error.hpp"
#include "geoagent/raster/pixelwise.hpp"
#include "geoagent/stats/descriptive.hpp"

namespace geoagent::stats {

namespace fs = std::filesystem;
using simd::compare_scalar;

Compare parse_comparator(std::string_view s) {
    if (s == ">" || s == "gt") return Compare::Greater;
    if (s == "<" || s == "lt") return Compare::Less;
    if (s == ">=" || s == "≥" || s == "ge") return Compare::GreaterEqual;
    if (s == "<=" || s == "≤" || s == "le") return Compare::LessEqual;
    throw Error(Errc::InvalidArgument, "unknown comparator '" + std::string(s) + "'");
}

std::string_view comparator_symbol(Compare c) noexcept {
    switch (c) {
    case Compare::Greater: return ">";
    case Compare::Less: return "<";
    case Compare::GreaterEqual: return ">=";
    case Compare::LessEqual: return "<=";
    }
    return "?";
}

Compare side_comparator(Side s) noexcept {
    return s == Side::Above ? Compare::Greater : Compare::Less;
}

namespace {

void check_conditions(const Raster& r, std::span<const Condition> conds) {
    if (conds.empty()) throw Error(Errc::InvalidArgument, "at least one condition is required");
    for (const Condition& c : conds)
        if (c.band >= r.bands())
            throw Error(Errc::ConditionBandMissing,
                        "condition on band " + std::to_string(c.band + 1) + " but image has " +
                            std::to_string(r.bands()) + " band(s)");
}

// -1 when some referenced band is nodata, else 1/0 for pass/fail.
int evaluate(const Raster& r, std::span<const Condition> conds, std::size_t px) {
    bool pass = true;
    for (const Condition& c : conds) {
        const double v = r.band(c.band)[px];
        if (!r.is_valid(v)) return -1;
        pass = pass && compare_scalar(c.cmp, v, c.value);
    }
    return pass ? 1 : 0;
}

} // namespace

ConditionCount count_conditions(const Raster& r, std::span<const Condition> conds) {
    check_conditions(r, conds);
    ConditionCount out;
    for (std::size_t px = 0; px < r.pixels(); ++px) {
        const int e = evaluate(r, conds, px);
        if (e < 0) continue;
        ++out.valid;
        out.selected += std::size_t(e);
    }
    return out;
}

Raster condition_mask(const Raster& r, std::span<const Condition> conds) {
    check_conditions(r, conds);
    std::vector<double> m(r.pixels());
    for (std::size_t px = 0; px < r.pixels(); ++px) m[px] = evaluate(r, conds, px) == 1 ? 1 : 0;
    return raster::make_mask_like(r, std::move(m));
}

double hotspot_percentage(const Raster& r, double threshold, std::size_t band) {
    raster::require_band(r, band);
    const Condition c{band, Compare::Greater, threshold};
    return count_conditions(r, {&c, 1}).percentage();
}

Raster hotspot_map(const Raster& r, double threshold, std::size_t band) {
    raster::require_band(r, band);
    const Condition c{band, Compare::Less, threshold};
    return condition_mask(r, {&c, 1});
}

std::vector<double> batch_hotspot_percentage(const Workspace& ws,
                                             std::span<const std::string> paths,
                                             double threshold, std::size_t band) {
    return map_images(ws, paths,
                      [&](const Raster& r) { return hotspot_percentage(r, threshold, band); });
}

std::vector<fs::path> batch_hotspot_tif(const Workspace& ws, std::span<const std::string> paths,
                                        double threshold, const std::string& out_dir,
                                        std::size_t band) {
    std::size_t i = 0;
    return map_images(ws, paths, [&](const Raster& r) {
        const auto name = "hotspot_" + fs::path(paths[i++]).stem().string() + ".tif";
        return ws.write(hotspot_map(r, threshold, band), (fs::path(out_dir) / name).string());
    });
}

double threshold_ratio(const Workspace& ws, std::span<const std::string> paths, double threshold,
                       std::size_t band) {
    const auto pct = batch_hotspot_percentage(ws, paths, threshold, band);
    double s = 0.0;
    for (double p : pct) s += p;
    return s / double(pct.size());
}

std::size_t count_images_exceeding_ratio(const Workspace& ws, std::span<const std::string> paths,
                                         double value_threshold, double ratio_threshold,
                                         Side side, std::size_t band) {
    const auto pct = map_images(ws, paths, [&](const Raster& r) {
        raster::require_band(r, band);
        const Condition c{band, side_comparator(side), value_threshold};
        return count_conditions(r, {&c, 1}).percentage();
    });
    return std::size_t(std::count_if(pct.begin(), pct.end(),
                                     [&](double p) { return p > ratio_threshold; }));
}

double average_ratio_exceeding(const Workspace& ws, std::span<const std::string> paths,
                               double value_threshold, double ratio_threshold,
                               std::size_t band) {
    const auto pct = batch_hotspot_percentage(ws, paths, value_threshold, band);
    double s = 0.0;
    std::size_t n = 0;
    for (double p : pct)
        if (p > ratio_threshold) {
            s += p;
            ++n;
        }
    if (n == 0) throw Error(Errc::EmptySelection, "no image exceeds the ratio threshold");
    return s / double(n);
}

ImageMeanThreshold images_mean_vs_threshold(const Workspace& ws,
                                            std::span<const std::string> paths,
                                            double threshold, Side side, std::size_t band) {
    const auto means = batch_image_stat(ws, paths, ImageStat::Mean, band);
    ImageMeanThreshold out;
    for (double m : means) out.count += compare_scalar(side_comparator(side), m, threshold);
    out.percentage = 100.0 * double(out.count) / double(means.size());
    return out;
}

std::size_t count_images_vs_mean_multiplier(const Workspace& ws,
                                            std::span<const std::string> paths,
                                            double multiplier, Side side, std::size_t band) {
    const auto means = batch_image_stat(ws, paths, ImageStat::Mean, band);
    double global = 0.0;
    for (double m : means) global += m;
    global /= double(means.size());
    const double cut = multiplier * global;
    return std::size_t(std::count_if(means.begin(), means.end(), [&](double m) {
        return compare_scalar(side_comparator(side), m, cut);
    }));
}

std::vector<std::size_t> batch_fire_pixels(const Workspace& ws,
                                           std::span<const std::string> paths, double threshold,
                                           std::size_t band) {
    return map_images(ws, paths, [&](const Raster& r) {
        raster::require_band(r, band);
        const Condition c{band, Compare::Greater, threshold};
        return count_conditions(r, {&c, 1}).selected;
    });
}

Raster fire_increase_map(const Raster& before, const Raster& after, double threshold) {
    raster::require_same_grid(before, after);
    std::vector<double> m(after.pixels(), 0.0);
    const auto a = before.band(0), b = after.band(0);
    for (std::size_t i = 0; i < m.size(); ++i)
        if (before.is_valid(a[i]) && after.is_valid(b[i]) && b[i] - a[i] > threshold) m[i] = 1;
    return raster::make_mask_like(after, std::move(m));
}

Raster fire_prone_areas(const Raster& frequency, double pct) {
    auto valid = frequency.valid_values(0);
    if (valid.empty()) throw Error(Errc::EmptySelection, "frequency map has no valid pixels");
    const double cut = percentile(std::move(valid), pct);
    const Condition c{0, Compare::Greater, cut};
    return condition_mask(frequency, {&c, 1});
}

namespace {

void require_condition_band(const Raster& r, std::size_t band) {
    if (band >= r.bands())
        throw Error(Errc::ConditionBandMissing, "condition band " + std::to_string(band + 1) +
                                                    " not in image with " +
                                                    std::to_string(r.bands()) + " band(s)");
}

} // namespace

double band_mean_by_condition(const Raster& target, std::size_t target_band,
                              const Raster& condition, std::size_t condition_band, Compare cmp,
                              double threshold) {
    raster::require_same_grid(target, condition);
    raster::require_band(target, target_band);
    require_condition_band(condition, condition_band);
    const auto t = target.band(target_band);
    const auto c = condition.band(condition_band);
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!target.is_valid(t[i]) || !condition.is_valid(c[i])) continue;
        if (!compare_scalar(cmp, c[i], threshold)) continue;
        s += t[i];
        ++n;
    }
    if (n == 0) throw Error(Errc::EmptySelection, "no pixel satisfies the condition");
    return s / double(n);
}

double threshold_value_mean(const Raster& gate, const Raster& values, double threshold) {
    return band_mean_by_condition(values, 0, gate, 0, Compare::Greater, threshold);
}

double intersection_percentage(const Raster& a, Compare cmp_a, double threshold_a,
                               const Raster& b, Compare cmp_b, double threshold_b) {
    raster::require_same_grid(a, b);
    const auto x = a.band(0), y = b.band(0);
    std::size_t valid = 0, both = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!a.is_valid(x[i]) || !b.is_valid(y[i])) continue;
        ++valid;
        both += compare_scalar(cmp_a, x[i], threshold_a) && compare_scalar(cmp_b, y[i], threshold_b);
    }
    if (valid == 0) throw Error(Errc::EmptySelection, "no pixel is valid in both images");
    return 100.0 * double(both) / double(valid);
}

double image_division_mean(const Raster& a, std::size_t band_a, const Raster& b,
                           std::size_t band_b) {
    raster::require_same_grid(a, b);
    raster::require_band(a, band_a);
    raster::require_band(b, band_b);
    const auto x = a.band(band_a), y = b.band(band_b);
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!a.is_valid(x[i]) || !b.is_valid(y[i]) || y[i] == 0.0) continue;
        s += x[i] / y[i];
        ++n;
    }
    if (n == 0) throw Error(Errc::EmptySelection, "no pixel with a usable denominator");
    return s / double(n);
}

} // namespace geoagent::stats
