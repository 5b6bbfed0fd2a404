// SPDX-License-Identifier: Apache-2.0
#include "geoagent/index/index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "geoagent/error.hpp"
#include "geoagent/raster/io.hpp"
#include "geoagent/raster/pixelwise.hpp"
#include "geoagent/simd/kernels.hpp"

namespace geoagent::index {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr BandRole kNirRed[] = {BandRole::NIR, BandRole::Red};
constexpr BandRole kNirSwir[] = {BandRole::NIR, BandRole::SWIR};
constexpr BandRole kSwirNir[] = {BandRole::SWIR, BandRole::NIR};
constexpr BandRole kNirRedBlue[] = {BandRole::NIR, BandRole::Red, BandRole::Blue};
constexpr BandRole kGreenRedNirSwir[] = {BandRole::Green, BandRole::Red, BandRole::NIR,
                                         BandRole::SWIR};
constexpr BandRole kRedGreen[] = {BandRole::Red, BandRole::Green};
constexpr BandRole kGreenSwir[] = {BandRole::Green, BandRole::SWIR};

void fvc_in_place(std::vector<double>& v, double ndvi_min, double ndvi_max) {
    if (!(ndvi_max > ndvi_min))
        throw Error(Errc::DegenerateRange, "FVC needs ndvi_max > ndvi_min");
    const double span = ndvi_max - ndvi_min;
    for (double& x : v) {
        if (std::isnan(x)) continue;
        const double f = std::clamp((x - ndvi_min) / span, 0.0, 1.0);
        x = f * f;
    }
}

const Raster& role(IndexKind kind, const BandSet& bands, BandRole r) {
    const auto it = bands.find(r);
    if (it == bands.end() || it->second == nullptr)
        throw Error(Errc::MissingBandRole, std::string(kind_name(kind)) + " needs a " +
                                               std::string(role_name(r)) + " band");
    return *it->second;
}

} // namespace

std::string_view kind_name(IndexKind k) noexcept {
    switch (k) {
    case IndexKind::NDVI: return "ndvi";
    case IndexKind::NDWI: return "ndwi";
    case IndexKind::NDBI: return "ndbi";
    case IndexKind::EVI: return "evi";
    case IndexKind::NBR: return "nbr";
    case IndexKind::FVC: return "fvc";
    case IndexKind::WRI: return "wri";
    case IndexKind::NDTI: return "ndti";
    case IndexKind::NDSI: return "ndsi";
    }
    return "?";
}

std::string_view role_name(BandRole r) noexcept {
    switch (r) {
    case BandRole::Blue: return "blue";
    case BandRole::Green: return "green";
    case BandRole::Red: return "red";
    case BandRole::NIR: return "nir";
    case BandRole::SWIR: return "swir";
    }
    return "?";
}

std::span<const BandRole> required_roles(IndexKind k) noexcept {
    switch (k) {
    case IndexKind::NDVI:
    case IndexKind::FVC: return kNirRed;
    case IndexKind::NDWI:
    case IndexKind::NBR: return kNirSwir;
    case IndexKind::NDBI: return kSwirNir;
    case IndexKind::EVI: return kNirRedBlue;
    case IndexKind::WRI: return kGreenRedNirSwir;
    case IndexKind::NDTI: return kRedGreen;
    case IndexKind::NDSI: return kGreenSwir;
    }
    return {};
}

bool is_normalized_difference(IndexKind k) noexcept {
    switch (k) {
    case IndexKind::NDVI:
    case IndexKind::NDWI:
    case IndexKind::NDBI:
    case IndexKind::NBR:
    case IndexKind::NDTI:
    case IndexKind::NDSI: return true;
    default: return false;
    }
}

ValueRange declared_range(IndexKind k) noexcept {
    if (is_normalized_difference(k)) return {-1.0, 1.0};
    switch (k) {
    case IndexKind::FVC: return {0.0, 1.0};
    case IndexKind::WRI: return {0.0, kInf};
    default: return {-kInf, kInf};
    }
}

Raster compute_index(IndexKind kind, const BandSet& bands, const IndexParams& params) {
    const auto roles = required_roles(kind);
    std::vector<const Raster*> in;
    for (BandRole r : roles) in.push_back(&role(kind, bands, r));
    for (const Raster* r : in) {
        if (r->bands() != 1)
            throw Error(Errc::MultiBandInput, std::string(kind_name(kind)) +
                                                  " expects single-band inputs");
        raster::require_same_grid(*in.front(), *r);
    }
    std::vector<std::vector<double>> x;
    for (const Raster* r : in) x.push_back(r->masked_band(0));
    std::vector<double> out(x[0].size());
    const auto& k = simd::active();
    const std::size_t n = out.size();

    switch (kind) {
    case IndexKind::NDVI:
    case IndexKind::NDWI:
    case IndexKind::NDBI:
    case IndexKind::NBR:
    case IndexKind::NDTI:
    case IndexKind::NDSI:
        k.normalized_difference(x[0].data(), x[1].data(), out.data(), n);
        break;
    case IndexKind::EVI:
        k.enhanced_vegetation(x[0].data(), x[1].data(), x[2].data(), out.data(), n, 2.5, 6.0, 7.5,
                              1.0);
        break;
    case IndexKind::WRI:
        k.ratio_of_sums(x[0].data(), x[1].data(), x[2].data(), x[3].data(), out.data(), n);
        break;
    case IndexKind::FVC: {
        k.normalized_difference(x[0].data(), x[1].data(), out.data(), n);
        fvc_in_place(out, params.fvc_ndvi_min, params.fvc_ndvi_max);
        break;
    }
    }
    return raster::make_f32_like(*in.front(), std::move(out));
}

Raster compute_fvc(const Raster& ndvi, double ndvi_min, double ndvi_max) {
    std::vector<double> v = ndvi.masked_band(0);
    fvc_in_place(v, ndvi_min, ndvi_max);
    return raster::make_f32_like(ndvi, std::move(v));
}

fs::path compute_index_file(const Workspace& ws, IndexKind kind, const BandPaths& bands,
                            const std::string& out, const IndexParams& params) {
    std::map<BandRole, Raster> loaded;
    BandSet set;
    for (BandRole r : required_roles(kind)) {
        const auto it = bands.find(r);
        if (it == bands.end())
            throw Error(Errc::MissingBandRole, std::string(kind_name(kind)) + " needs a " +
                                                   std::string(role_name(r)) + " band");
        set[r] = &(loaded[r] = ws.load(it->second));
    }
    const Raster result = compute_index(kind, set, params);
    const fs::path target = ws.resolve_output(out);
    raster::write_tiff(result, target);
    return target;
}

std::vector<std::string> batch_output_names(IndexKind kind, std::span<const BandPaths> items,
                                            const std::string& out_dir) {
    const BandRole first = required_roles(kind).front();
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto it = items[i].find(first);
        const std::string stem =
            it == items[i].end() ? std::to_string(i) : fs::path(it->second).stem().string();
        std::string name = std::string(kind_name(kind)) + "_" + stem;
        if (!seen.insert(name).second) name += "_" + std::to_string(i);
        names.push_back((fs::path(out_dir) / (name + ".tif")).string());
    }
    return names;
}

std::vector<fs::path> compute_batch_index(const Workspace& ws, IndexKind kind,
                                          std::span<const BandPaths> items,
                                          const std::string& out_dir, const IndexParams& params) {
    if (items.empty()) throw Error(Errc::EmptyBatch, "empty input list");
    const auto names = batch_output_names(kind, items, out_dir);
    std::vector<fs::path> out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        try {
            out.push_back(compute_index_file(ws, kind, items[i], names[i], params));
        } catch (const Error& e) {
            rethrow_with_index(e, i);
        }
    }
    return out;
}

Raster frp_mask(const Raster& frp, double threshold) {
    if (frp.bands() != 1) throw Error(Errc::MultiBandInput, "FRP mask expects a single band");
    std::vector<double> v = frp.masked_band(0);
    simd::compare(simd::Compare::Greater, v, threshold, v);
    for (double& x : v)
        if (std::isnan(x)) x = 0.0;
    return raster::make_mask_like(frp, std::move(v));
}

std::vector<fs::path> compute_frp_masks(const Workspace& ws, std::span<const std::string> paths,
                                        double threshold, const std::string& out_dir) {
    if (paths.empty()) throw Error(Errc::EmptyBatch, "empty input list");
    std::vector<fs::path> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        try {
            const Raster mask = frp_mask(ws.load(paths[i]), threshold);
            std::string name = "frp_" + fs::path(paths[i]).stem().string();
            if (!seen.insert(name).second) name += "_" + std::to_string(i);
            const fs::path target = ws.resolve_output((fs::path(out_dir) / (name + ".tif")).string());
            raster::write_tiff(mask, target);
            out.push_back(target);
        } catch (const Error& e) {
            rethrow_with_index(e, i);
        }
    }
    return out;
}

namespace {

Edge least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw Error(Errc::InsufficientBins, "edge points share one NDVI value");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

} // namespace

TvdiResult compute_tvdi(const Raster& ndvi, const Raster& lst, std::size_t bins) {
    raster::require_same_grid(ndvi, lst);
    if (bins < 2) throw Error(Errc::InvalidArgument, "TVDI needs at least 2 bins");
    const auto v = ndvi.masked_band(0);
    const auto t = lst.masked_band(0);
    double lo = kInf, hi = -kInf;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::isnan(v[i]) || std::isnan(t[i])) continue;
        lo = std::min(lo, v[i]);
        hi = std::max(hi, v[i]);
    }
    if (!(hi > lo)) throw Error(Errc::InsufficientBins, "NDVI has no spread");

    struct Bin {
        std::size_t count = 0;
        std::size_t argmax = 0, argmin = 0;
    };
    std::vector<Bin> b(bins);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::isnan(v[i]) || std::isnan(t[i])) continue;
        const auto k = std::min(bins - 1, static_cast<std::size_t>((v[i] - lo) / width));
        Bin& bin = b[k];
        if (bin.count == 0 || t[i] > t[bin.argmax]) bin.argmax = i;
        if (bin.count == 0 || t[i] < t[bin.argmin]) bin.argmin = i;
        ++bin.count;
    }
    std::vector<double> dx, dy, wx, wy;
    for (const Bin& bin : b) {
        if (bin.count < 3) continue;
        dx.push_back(v[bin.argmax]);
        dy.push_back(t[bin.argmax]);
        wx.push_back(v[bin.argmin]);
        wy.push_back(t[bin.argmin]);
    }
    if (dx.size() < 2)
        throw Error(Errc::InsufficientBins,
                    "only " + std::to_string(dx.size()) + " NDVI bin(s) hold 3 or more pixels");

    TvdiResult r;
    r.dry = least_squares(dx, dy);
    r.wet = least_squares(wx, wy);
    r.bins_used = dx.size();
    std::vector<double> out(v.size(), kNaN);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::isnan(v[i]) || std::isnan(t[i])) continue;
        const double wet = r.wet.at(v[i]);
        const double denom = r.dry.at(v[i]) - wet;
        if (denom == 0.0) continue;
        out[i] = std::clamp((t[i] - wet) / denom, 0.0, 1.0);
    }
    r.tvdi = raster::make_f32_like(ndvi, std::move(out));
    return r;
}

fs::path compute_tvdi_file(const Workspace& ws, const std::string& ndvi_path,
                           const std::string& lst_path, const std::string& out, std::size_t bins) {
    const auto r = compute_tvdi(ws.load(ndvi_path), ws.load(lst_path), bins);
    const fs::path target = ws.resolve_output(out);
    raster::write_tiff(r.tvdi, target);
    return target;
}

double extreme_snow_loss_percentage(const Raster& map) {
    const auto v = map.valid_values(0);
    if (v.empty()) throw Error(Errc::EmptySelection, "binary map has no valid pixels");
    bool has1 = false, has255 = false;
    std::size_t ones = 0;
    for (double x : v) {
        if (x == 1.0) has1 = true;
        else if (x == 255.0) has255 = true;
        else if (x != 0.0)
            throw Error(Errc::NonBinaryInput, "value " + std::to_string(x) + " is not 0/1/255");
        if (x != 0.0) ++ones;
    }
    if (has1 && has255) throw Error(Errc::NonBinaryInput, "map mixes 1 and 255 as foreground");
    return 100.0 * static_cast<double>(ones) / static_cast<double>(v.size());
}

} // namespace geoagent::index
