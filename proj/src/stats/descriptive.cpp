// SPDX-License-Identifier: Apache-2.0
#include "geoagent/stats/descriptive.hpp"

#include <algorithm>
#include <cmath>

#include "geoagent/error.hpp"
#include "geoagent/raster/pixelwise.hpp"
#include "geoagent/simd/kernels.hpp"

namespace geoagent::stats {

double Moments::stddev() const noexcept { return std::sqrt(variance()); }

double Moments::skewness() const {
    if (m2 == 0.0) throw Error(Errc::ZeroVariance, "skewness undefined for constant data");
    const double n = double(count);
    return (m3 / n) / std::pow(m2 / n, 1.5);
}

double Moments::kurtosis() const {
    if (m2 == 0.0) throw Error(Errc::ZeroVariance, "kurtosis undefined for constant data");
    const double n = double(count);
    return (m4 / n) / ((m2 / n) * (m2 / n)) - 3.0;
}

Moments moments(std::span<const double> values) {
    const auto s = simd::summarize(values);
    Moments m;
    m.count = s.count;
    m.sum = s.sum;
    m.min = s.min;
    m.max = s.max;
    if (s.count == 0) return m;
    m.mean = s.sum / double(s.count);
    const auto c = simd::central_sums(values, m.mean);
    m.m2 = c.m2;
    m.m3 = c.m3;
    m.m4 = c.m4;
    return m;
}

namespace {

void require_count(std::size_t n, std::size_t need, const char* what) {
    if (n < need)
        throw Error(n == 0 ? Errc::EmptyList : Errc::TooShort,
                    std::string(what) + " needs at least " + std::to_string(need) +
                        " values, got " + std::to_string(n));
}

} // namespace

double scalar_stat(std::span<const double> data, ScalarStat stat) {
    const Moments m = moments(data);
    switch (stat) {
    case ScalarStat::Mean:
        require_count(m.count, 1, "mean");
        return m.mean;
    case ScalarStat::CV:
        require_count(m.count, 2, "coefficient of variation");
        if (m.mean == 0.0) throw Error(Errc::ZeroMean, "coefficient of variation at zero mean");
        return m.stddev() / m.mean;
    case ScalarStat::Skewness:
        require_count(m.count, 3, "skewness");
        return m.skewness();
    case ScalarStat::Kurtosis:
        require_count(m.count, 4, "kurtosis");
        return m.kurtosis();
    }
    throw Error(Errc::Internal, "unknown statistic");
}

double median(std::vector<double> values) { return percentile(std::move(values), 50.0); }

double percentile(std::vector<double> values, double q) {
    std::erase_if(values, [](double v) { return std::isnan(v); });
    if (values.empty()) throw Error(Errc::EmptyList, "no values");
    if (!(q >= 0.0 && q <= 100.0))
        throw Error(Errc::InvalidArgument, "percentile must lie in [0, 100]");
    const double pos = q / 100.0 * double(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    std::nth_element(values.begin(), values.begin() + long(lo), values.end());
    const double a = values[lo];
    if (hi == lo || pos == double(lo)) return a;
    const double b = *std::min_element(values.begin() + long(lo) + 1, values.end());
    return a + (b - a) * (pos - double(lo));
}

std::string_view image_stat_name(ImageStat s) noexcept {
    switch (s) {
    case ImageStat::Mean: return "mean";
    case ImageStat::Std: return "std";
    case ImageStat::Median: return "median";
    case ImageStat::Min: return "min";
    case ImageStat::Max: return "max";
    case ImageStat::Skewness: return "skewness";
    case ImageStat::Kurtosis: return "kurtosis";
    case ImageStat::Sum: return "sum";
    }
    return "?";
}

double image_stat(const Raster& r, ImageStat stat, std::size_t band) {
    raster::require_band(r, band);
    const auto values = r.masked_band(band);
    if (stat == ImageStat::Median) {
        auto v = r.valid_values(band);
        if (v.empty()) throw Error(Errc::EmptySelection, "image has no valid pixels");
        return median(std::move(v));
    }
    const Moments m = moments(values);
    if (m.count == 0) throw Error(Errc::EmptySelection, "image has no valid pixels");
    switch (stat) {
    case ImageStat::Mean: return m.mean;
    case ImageStat::Std: return m.stddev();
    case ImageStat::Min: return m.min;
    case ImageStat::Max: return m.max;
    case ImageStat::Skewness: return m.skewness();
    case ImageStat::Kurtosis: return m.kurtosis();
    case ImageStat::Sum: return m.sum;
    case ImageStat::Median: break;
    }
    throw Error(Errc::Internal, "unknown image statistic");
}

std::vector<double> batch_image_stat(const Workspace& ws, std::span<const std::string> paths,
                                     ImageStat stat, std::size_t band) {
    return map_images(ws, paths, [&](const Raster& r) { return image_stat(r, stat, band); });
}

double batch_mean_of_means(const Workspace& ws, std::span<const std::string> paths,
                           std::size_t band) {
    const auto means = batch_image_stat(ws, paths, ImageStat::Mean, band);
    double s = 0.0;
    for (double m : means) s += m;
    return s / double(means.size());
}

double batch_max_of_means(const Workspace& ws, std::span<const std::string> paths,
                          std::size_t band) {
    const auto means = batch_image_stat(ws, paths, ImageStat::Mean, band);
    return *std::max_element(means.begin(), means.end());
}

MeanMaxMin batch_mean_max_min(const Workspace& ws, std::span<const std::string> paths,
                              std::size_t band) {
    const auto per = map_images(ws, paths, [&](const Raster& r) {
        raster::require_band(r, band);
        const Moments m = moments(r.masked_band(band));
        if (m.count == 0) throw Error(Errc::EmptySelection, "image has no valid pixels");
        return m;
    });
    MeanMaxMin out{0.0, per.front().max, per.front().min};
    for (const Moments& m : per) {
        out.mean_of_means += m.mean;
        out.max_of_maxes = std::max(out.max_of_maxes, m.max);
        out.min_of_mins = std::min(out.min_of_mins, m.min);
    }
    out.mean_of_means /= double(per.size());
    return out;
}

} // namespace geoagent::stats
