// SPDX-License-Identifier: Apache-2.0
#include "geoagent/inversion/inversion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "geoagent/error.hpp"
#include "geoagent/raster/pixelwise.hpp"
#include "geoagent/simd/kernels.hpp"

namespace geoagent::inversion {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Radiation constants for wavelength in um: c1 in W um^4 m^-2 sr^-1, c2 in um K.
constexpr double kC1 = 1.191042e8;
constexpr double kC2 = 1.4387752e4;

// Second radiation constant h*c/k_B in m K, used by the single-channel form.
constexpr double kRho = 1.438e-2;

constexpr std::array<double, 5> kAster5 = {8.291, 8.634, 9.075, 10.657, 11.318};
constexpr std::array<double, 3> kAster3 = {9.075, 10.657, 11.318};

Coefficients merge(const Coefficients& defaults, const Coefficients& overrides,
                   std::string_view method) {
    Coefficients out = defaults;
    for (const auto& [k, v] : overrides) {
        const auto it = out.find(k);
        if (it == out.end())
            throw Error(Errc::InvalidArgument,
                        "unknown coefficient '" + k + "' for " + std::string(method));
        it->second = v;
    }
    return out;
}

const Raster& input(const Inputs& in, const std::string& role, std::string_view method) {
    const auto it = in.find(role);
    if (it == in.end() || it->second == nullptr)
        throw Error(Errc::MissingBandRole,
                    std::string(method) + " needs an input named '" + role + "'");
    return *it->second;
}

// Inputs "band1".."bandN", contiguous from 1.
std::vector<const Raster*> numbered_bands(const Inputs& in, std::size_t min_count,
                                          std::string_view method) {
    std::vector<const Raster*> out;
    for (std::size_t i = 1;; ++i) {
        const auto it = in.find("band" + std::to_string(i));
        if (it == in.end() || it->second == nullptr) break;
        out.push_back(it->second);
    }
    if (out.size() < min_count)
        throw Error(Errc::MissingBandRole, std::string(method) + " needs band1..band" +
                                               std::to_string(min_count) + " at least");
    return out;
}

std::vector<std::vector<double>> masked(std::span<const Raster* const> rs) {
    for (const Raster* r : rs) raster::require_same_grid(*rs.front(), *r);
    std::vector<std::vector<double>> out;
    for (const Raster* r : rs) out.push_back(r->masked_band(0));
    return out;
}

double single_channel_correct(double bt, double emissivity, double wavelength_um) {
    return bt / (1.0 + (wavelength_um * 1e-6 * bt / kRho) * std::log(emissivity));
}

double planck_dT(double wl, double t) {
    const double x = kC2 / (wl * t);
    const double ex = std::exp(x);
    return planck_radiance(wl, t) * (x / t) * ex / (ex - 1.0);
}

struct TesOut {
    double t;
    bool converged;
};

TesOut tes_pixel(std::span<const double> bt, std::span<const double> wl, int max_iter,
                 double tol) {
    const std::size_t n = bt.size();
    std::vector<double> rad(n), eps(n);
    for (std::size_t i = 0; i < n; ++i) rad[i] = planck_radiance(wl[i], bt[i]);
    double t = -1.0;
    for (std::size_t i = 0; i < n; ++i) t = std::max(t, brightness_temperature(wl[i], rad[i] / 0.99));
    for (int it = 0; it < max_iter; ++it) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            eps[i] = rad[i] / planck_radiance(wl[i], t);
            mean += eps[i];
        }
        mean /= static_cast<double>(n);
        double bmin = eps[0] / mean, bmax = bmin;
        for (double e : eps) {
            bmin = std::min(bmin, e / mean);
            bmax = std::max(bmax, e / mean);
        }
        const double emin = 0.994 - 0.687 * std::pow(bmax - bmin, 0.737);
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) {
            eps[i] = (eps[i] / mean) * emin / bmin;
            if (eps[i] > eps[k]) k = i;
        }
        const double next = brightness_temperature(wl[k], rad[k] / eps[k]);
        const bool done = std::abs(next - t) < tol;
        t = next;
        if (done) return {t, true};
    }
    return {t, false};
}

// Solves a 3x3 system in place by Gaussian elimination with partial pivoting.
bool solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3>& b) {
    for (int c = 0; c < 3; ++c) {
        int p = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        if (a[p][c] == 0.0) return false;
        std::swap(a[p], a[c]);
        std::swap(b[p], b[c]);
        for (int r = c + 1; r < 3; ++r) {
            const double f = a[r][c] / a[c][c];
            for (int k = c; k < 3; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    for (int c = 2; c >= 0; --c) {
        for (int k = c + 1; k < 3; ++k) b[c] -= a[c][k] * b[k];
        b[c] /= a[c][c];
    }
    return true;
}

// Temperature plus emissivity linear in wavelength, fitted to three bands by
// damped Newton. Returns NaN when the iteration leaves the physical bounds or
// does not settle.
double ttm_pixel(const std::array<double, 3>& bt, const std::array<double, 3>& wl) {
    const double wl_mean = (wl[0] + wl[1] + wl[2]) / 3.0;
    std::array<double, 3> rad, d;
    for (int i = 0; i < 3; ++i) {
        rad[i] = planck_radiance(wl[i], bt[i]);
        d[i] = wl[i] - wl_mean;
    }
    auto feasible = [&](double t, double e, double g) {
        if (!(t >= 200.0 && t <= 400.0)) return false;
        for (int i = 0; i < 3; ++i) {
            const double eps = e + g * d[i];
            if (!(eps > 0.8 && eps <= 1.0)) return false;
        }
        return true;
    };
    auto residual = [&](double t, double e, double g, std::array<double, 3>& r) {
        double norm = 0.0;
        for (int i = 0; i < 3; ++i) {
            r[i] = (e + g * d[i]) * planck_radiance(wl[i], t) / rad[i] - 1.0;
            norm += r[i] * r[i];
        }
        return norm;
    };
    double e = 0.97, g = 0.0, t = 0.0;
    for (int i = 0; i < 3; ++i) t = std::max(t, brightness_temperature(wl[i], rad[i] / e));
    if (!feasible(t, e, g)) return kNaN;
    std::array<double, 3> r;
    double norm = residual(t, e, g, r);
    for (int it = 0; it < 60; ++it) {
        if (norm < 1e-24) return t;
        std::array<std::array<double, 3>, 3> j;
        for (int i = 0; i < 3; ++i) {
            const double b = planck_radiance(wl[i], t);
            j[i] = {(e + g * d[i]) * planck_dT(wl[i], t) / rad[i], b / rad[i], d[i] * b / rad[i]};
        }
        std::array<double, 3> step = {-r[0], -r[1], -r[2]};
        if (!solve3(j, step)) return kNaN;
        double lambda = 1.0;
        bool moved = false;
        for (int k = 0; k < 30; ++k, lambda *= 0.5) {
            const double nt = t + lambda * step[0], ne = e + lambda * step[1],
                         ng = g + lambda * step[2];
            if (!feasible(nt, ne, ng)) continue;
            std::array<double, 3> nr;
            const double nn = residual(nt, ne, ng, nr);
            if (nn < norm) {
                t = nt, e = ne, g = ng, r = nr, norm = nn;
                moved = true;
                break;
            }
        }
        if (!moved) return norm < 1e-20 ? t : kNaN;
    }
    return norm < 1e-20 ? t : kNaN;
}

Raster with_values(const Raster& like, std::vector<double> v) {
    return raster::make_f32_like(like, std::move(v));
}

} // namespace

double planck_radiance(double wl, double t) noexcept {
    return kC1 / (std::pow(wl, 5) * (std::exp(kC2 / (wl * t)) - 1.0));
}

double brightness_temperature(double wl, double radiance) noexcept {
    return kC2 / (wl * std::log1p(kC1 / (std::pow(wl, 5) * radiance)));
}

std::string_view method_name(LstMethod m) noexcept {
    switch (m) {
    case LstMethod::SingleChannel: return "single_channel";
    case LstMethod::MultiChannel: return "multi_channel";
    case LstMethod::SplitWindow: return "split_window";
    case LstMethod::TES: return "tes";
    case LstMethod::ModisDayNight: return "modis_day_night";
    case LstMethod::TTM: return "ttm";
    }
    return "?";
}

std::string_view method_name(MicrowaveMethod m) noexcept {
    switch (m) {
    case MicrowaveMethod::DPDM: return "dpdm";
    case MicrowaveMethod::DualFreqDiff: return "dual_frequency_diff";
    case MicrowaveMethod::MultiFreqBT: return "multi_freq_bt";
    case MicrowaveMethod::Chang: return "chang";
    case MicrowaveMethod::PolarizationRatio: return "polarization_ratio";
    case MicrowaveMethod::NasaTeamSIC: return "nasa_team";
    }
    return "?";
}

std::vector<std::string> required_roles(LstMethod m) {
    switch (m) {
    case LstMethod::SingleChannel: return {"bt", "red", "nir"};
    case LstMethod::MultiChannel:
    case LstMethod::SplitWindow: return {"band31", "band32"};
    case LstMethod::TES:
    case LstMethod::TTM: return {"band1", "band2", "band3"};
    case LstMethod::ModisDayNight: return {"day", "night"};
    }
    return {};
}

std::vector<std::string> required_roles(MicrowaveMethod m) {
    switch (m) {
    case MicrowaveMethod::DPDM:
    case MicrowaveMethod::PolarizationRatio: return {"v", "h"};
    case MicrowaveMethod::DualFreqDiff:
    case MicrowaveMethod::MultiFreqBT: return {"band1", "band2"};
    case MicrowaveMethod::Chang: return {"18h", "37h"};
    case MicrowaveMethod::NasaTeamSIC: return {"19h", "19v", "37v"};
    }
    return {};
}

Coefficients default_coefficients(LstMethod m, std::size_t n) {
    switch (m) {
    case LstMethod::MultiChannel: return {{"a", 1.022}, {"b", 0.47}, {"c", 0.43}};
    case LstMethod::SingleChannel:
        return {{"wavelength_um", 10.9}, {"ndvi_soil", 0.2},    {"ndvi_veg", 0.5},
                {"emis_soil", 0.973},    {"emis_veg", 0.986}};
    case LstMethod::SplitWindow: return {{"c0", 0.268}, {"c1", 1.378}, {"c2", 0.183}};
    case LstMethod::ModisDayNight: return {{"emissivity", 0.98}, {"wavelength_um", 11.03}};
    case LstMethod::TES: {
        Coefficients c{{"max_iterations", 12}, {"tolerance", 1e-4}};
        for (std::size_t i = 0; i < n; ++i) {
            double wl = kNaN;
            if (n == 5) wl = kAster5[i];
            else if (n == 3) wl = kAster3[i];
            c["wl" + std::to_string(i + 1)] = wl;
        }
        return c;
    }
    case LstMethod::TTM:
        return {{"wl1", kAster3[0]}, {"wl2", kAster3[1]}, {"wl3", kAster3[2]}};
    }
    return {};
}

Coefficients default_coefficients(MicrowaveMethod m, std::size_t n) {
    switch (m) {
    case MicrowaveMethod::DPDM:
    case MicrowaveMethod::DualFreqDiff:
    case MicrowaveMethod::PolarizationRatio: return {{"alpha", 1.0}, {"beta", 0.0}};
    case MicrowaveMethod::MultiFreqBT: {
        Coefficients c{{"beta", 0.0}};
        for (std::size_t i = 0; i < n; ++i)
            c["w" + std::to_string(i + 1)] = 1.0 / static_cast<double>(n);
        return c;
    }
    case MicrowaveMethod::Chang: return {{"k", 1.59}};
    case MicrowaveMethod::NasaTeamSIC:
        // Arctic tie points (K) for open water, first-year and multi-year ice.
        return {{"ow_19h", 100.8}, {"ow_19v", 177.1}, {"ow_37v", 201.7},
                {"fy_19h", 242.8}, {"fy_19v", 258.2}, {"fy_37v", 252.8},
                {"my_19h", 203.9}, {"my_19v", 223.2}, {"my_37v", 186.3}};
    }
    return {};
}

double ndvi_emissivity(double ndvi, double ndvi_soil, double ndvi_veg, double emis_soil,
                       double emis_veg) noexcept {
    if (ndvi < ndvi_soil) return emis_soil;
    if (ndvi > ndvi_veg) return emis_veg;
    const double f = (ndvi - ndvi_soil) / (ndvi_veg - ndvi_soil);
    const double pv = f * f;
    return emis_veg * pv + emis_soil * (1.0 - pv);
}

LstResult lst_estimate(LstMethod method, const Inputs& in, const Coefficients& overrides) {
    const auto name = method_name(method);
    LstResult res;
    switch (method) {
    case LstMethod::MultiChannel:
    case LstMethod::SplitWindow: {
        const Raster* rs[] = {&input(in, "band31", name), &input(in, "band32", name)};
        const auto x = masked(rs);
        std::vector<double> out(x[0].size());
        if (method == LstMethod::MultiChannel) {
            const auto c = merge(default_coefficients(method), overrides, name);
            simd::active().affine_difference(x[0].data(), x[1].data(), out.data(), out.size(),
                                             c.at("a"), c.at("b"), c.at("c"));
        } else {
            const auto c = merge(default_coefficients(method), overrides, name);
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double dt = x[0][i] - x[1][i];
                out[i] = x[0][i] + c.at("c1") * dt + c.at("c2") * dt * dt + c.at("c0");
            }
        }
        res.lst = with_values(*rs[0], std::move(out));
        return res;
    }
    case LstMethod::SingleChannel: {
        const auto c = merge(default_coefficients(method), overrides, name);
        const Raster* rs[] = {&input(in, "bt", name), &input(in, "red", name),
                              &input(in, "nir", name)};
        const auto x = masked(rs);
        std::vector<double> out(x[0].size(), kNaN);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double sum = x[2][i] + x[1][i];
            if (sum == 0.0 || std::isnan(sum) || std::isnan(x[0][i])) continue;
            const double ndvi = (x[2][i] - x[1][i]) / sum;
            const double eps = ndvi_emissivity(ndvi, c.at("ndvi_soil"), c.at("ndvi_veg"),
                                               c.at("emis_soil"), c.at("emis_veg"));
            out[i] = single_channel_correct(x[0][i], eps, c.at("wavelength_um"));
        }
        res.lst = with_values(*rs[0], std::move(out));
        return res;
    }
    case LstMethod::ModisDayNight: {
        const auto c = merge(default_coefficients(method), overrides, name);
        const Raster* rs[] = {&input(in, "day", name), &input(in, "night", name)};
        const auto x = masked(rs);
        const std::size_t n = x[0].size();
        std::vector<double> out(2 * n);
        for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t i = 0; i < n; ++i)
                out[b * n + i] =
                    single_channel_correct(x[b][i], c.at("emissivity"), c.at("wavelength_um"));
        Raster r(rs[0]->width(), rs[0]->height(), 2, raster::DataType::F32, std::move(out));
        r.set_nodata(kNaN);
        r.set_geo(rs[0]->geo());
        raster::narrow_to_dtype(r);
        res.lst = std::move(r);
        return res;
    }
    case LstMethod::TES: {
        const auto bands = numbered_bands(in, 3, name);
        const auto c = merge(default_coefficients(method, bands.size()), overrides, name);
        std::vector<double> wl;
        for (std::size_t i = 0; i < bands.size(); ++i) {
            wl.push_back(c.at("wl" + std::to_string(i + 1)));
            if (std::isnan(wl.back()))
                throw Error(Errc::InvalidArgument, "tes needs wl" + std::to_string(i + 1) +
                                                       " for " + std::to_string(bands.size()) +
                                                       " bands");
        }
        const auto x = masked(bands);
        std::vector<double> out(x[0].size(), kNaN), bt(bands.size());
        for (std::size_t p = 0; p < out.size(); ++p) {
            bool ok = true;
            for (std::size_t b = 0; b < bands.size(); ++b) {
                bt[b] = x[b][p];
                ok = ok && bt[b] > 0.0;
            }
            if (!ok) continue;
            const auto r = tes_pixel(bt, wl, static_cast<int>(c.at("max_iterations")),
                                     c.at("tolerance"));
            out[p] = r.t;
            if (!r.converged) ++res.nonconverged;
        }
        res.lst = with_values(*bands[0], std::move(out));
        return res;
    }
    case LstMethod::TTM: {
        const auto bands = numbered_bands(in, 3, name);
        const auto c = merge(default_coefficients(method), overrides, name);
        const std::array<double, 3> wl = {c.at("wl1"), c.at("wl2"), c.at("wl3")};
        const std::span<const Raster* const> first3(bands.data(), 3);
        const auto x = masked(first3);
        std::vector<double> out(x[0].size(), kNaN);
        for (std::size_t p = 0; p < out.size(); ++p) {
            const std::array<double, 3> bt = {x[0][p], x[1][p], x[2][p]};
            if (!(bt[0] > 0 && bt[1] > 0 && bt[2] > 0)) continue;
            out[p] = ttm_pixel(bt, wl);
            if (std::isnan(out[p])) ++res.nonconverged;
        }
        res.lst = with_values(*bands[0], std::move(out));
        return res;
    }
    }
    throw Error(Errc::Internal, "unknown LST method");
}

Raster ati(const Raster& albedo, const Raster& day, const Raster& night) {
    const Raster* rs[] = {&albedo, &day, &night};
    const auto x = masked(rs);
    std::vector<double> out(x[0].size(), kNaN);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double dt = x[1][i] - x[2][i];
        if (dt > 0.0 && !std::isnan(x[0][i])) out[i] = (1.0 - x[0][i]) / dt;
    }
    return with_values(albedo, std::move(out));
}

Raster microwave_invert(MicrowaveMethod method, const Inputs& in, const Coefficients& overrides) {
    const auto name = method_name(method);
    switch (method) {
    case MicrowaveMethod::DPDM:
    case MicrowaveMethod::DualFreqDiff:
    case MicrowaveMethod::PolarizationRatio: {
        const auto c = merge(default_coefficients(method), overrides, name);
        const bool pol = method != MicrowaveMethod::DualFreqDiff;
        const Raster* rs[] = {&input(in, pol ? "v" : "band1", name),
                              &input(in, pol ? "h" : "band2", name)};
        const auto x = masked(rs);
        std::vector<double> out(x[0].size());
        if (method == MicrowaveMethod::PolarizationRatio) {
            simd::active().normalized_difference(x[0].data(), x[1].data(), out.data(), out.size());
        } else {
            simd::active().binary(simd::BinaryOp::Sub, x[0].data(), x[1].data(), out.data(),
                                  out.size());
        }
        simd::active().scale_offset(out.data(), out.data(), out.size(), c.at("alpha"),
                                    c.at("beta"));
        return with_values(*rs[0], std::move(out));
    }
    case MicrowaveMethod::MultiFreqBT: {
        const auto bands = numbered_bands(in, 2, name);
        const auto c = merge(default_coefficients(method, bands.size()), overrides, name);
        const auto x = masked(bands);
        std::vector<double> out(x[0].size(), c.at("beta"));
        for (std::size_t b = 0; b < bands.size(); ++b) {
            const double w = c.at("w" + std::to_string(b + 1));
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * x[b][i];
        }
        return with_values(*bands[0], std::move(out));
    }
    case MicrowaveMethod::Chang: {
        const auto c = merge(default_coefficients(method), overrides, name);
        const Raster* rs[] = {&input(in, "18h", name), &input(in, "37h", name)};
        const auto x = masked(rs);
        std::vector<double> out(x[0].size());
        simd::active().binary(simd::BinaryOp::Sub, x[0].data(), x[1].data(), out.data(),
                              out.size());
        simd::active().scale_offset(out.data(), out.data(), out.size(), c.at("k"), 0.0);
        return with_values(*rs[0], std::move(out));
    }
    case MicrowaveMethod::NasaTeamSIC: {
        const auto c = merge(default_coefficients(method), overrides, name);
        const Raster* rs[] = {&input(in, "19h", name), &input(in, "19v", name),
                              &input(in, "37v", name)};
        const auto x = masked(rs);
        auto tb = [&](const char* type, const char* ch) {
            return c.at(std::string(type) + "_" + ch);
        };
        std::vector<double> out(x[0].size(), kNaN);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double h19 = x[0][i], v19 = x[1][i], v37 = x[2][i];
            if (!(v19 + h19 != 0.0 && v37 + v19 != 0.0)) continue;
            const double pr = (v19 - h19) / (v19 + h19);
            const double gr = (v37 - v19) / (v37 + v19);
            // Both ratios are linear constraints on the tie-point mixture:
            //   (1-PR) 19V - (1+PR) 19H = 0,  (1-GR) 37V - (1+GR) 19V = 0.
            auto eq1 = [&](const char* t) {
                return (1 - pr) * tb(t, "19v") - (1 + pr) * tb(t, "19h");
            };
            auto eq2 = [&](const char* t) {
                return (1 - gr) * tb(t, "37v") - (1 + gr) * tb(t, "19v");
            };
            const double c1 = eq1("ow"), c2 = eq2("ow");
            const double a1 = eq1("fy") - c1, b1 = eq1("my") - c1;
            const double a2 = eq2("fy") - c2, b2 = eq2("my") - c2;
            const double det = a1 * b2 - a2 * b1;
            if (det == 0.0) continue;
            const double fy = (-c1 * b2 + c2 * b1) / det;
            const double my = (-a1 * c2 + a2 * c1) / det;
            out[i] = std::clamp(100.0 * (fy + my), 0.0, 100.0);
        }
        return with_values(*rs[0], std::move(out));
    }
    }
    throw Error(Errc::Internal, "unknown microwave method");
}

Raster pwv_band_ratio(const Raster& absorption, const Raster& window,
                      const Coefficients& overrides) {
    const auto c = merge({{"alpha", 0.02}, {"beta", 0.651}}, overrides, "band_ratio");
    const Raster* rs[] = {&absorption, &window};
    const auto x = masked(rs);
    std::vector<double> out(x[0].size(), kNaN);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (x[1][i] == 0.0) continue;
        const double tau = x[0][i] / x[1][i];
        if (!(tau > 0.0)) continue;
        const double q = std::max(0.0, c.at("alpha") - std::log(tau)) / c.at("beta");
        out[i] = q * q;
    }
    return with_values(absorption, std::move(out));
}

Raster turbidity_ntu(const Raster& red, const Coefficients& overrides) {
    const auto c = merge({{"A", 228.1}, {"C", 0.1641}}, overrides, "turbidity");
    std::vector<double> v = red.masked_band(0);
    const double a = c.at("A"), cc = c.at("C");
    for (double& rho : v) {
        if (std::isnan(rho)) continue;
        rho = (rho >= 0.0 && rho < cc) ? a * rho / (1.0 - rho / cc) : kNaN;
    }
    return with_values(red, std::move(v));
}

double lst_stat_by_ndvi(LstStat stat, std::span<const Raster> lst, std::span<const Raster> ndvi,
                        double threshold, Direction dir) {
    if (lst.size() != ndvi.size())
        throw Error(Errc::PairCountMismatch, std::to_string(lst.size()) + " LST vs " +
                                                 std::to_string(ndvi.size()) + " NDVI rasters");
    if (lst.empty()) throw Error(Errc::EmptyList, "no rasters given");
    double sum = 0.0, mx = -std::numeric_limits<double>::infinity();
    std::size_t n = 0;
    for (std::size_t p = 0; p < lst.size(); ++p) {
        try {
            raster::require_same_grid(lst[p], ndvi[p]);
        } catch (const Error& e) {
            rethrow_with_index(e, p);
        }
        const auto t = lst[p].masked_band(0);
        const auto v = ndvi[p].masked_band(0);
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (std::isnan(t[i]) || std::isnan(v[i])) continue;
            const bool pick = dir == Direction::Above ? v[i] > threshold : v[i] < threshold;
            if (!pick) continue;
            sum += t[i];
            mx = std::max(mx, t[i]);
            ++n;
        }
    }
    if (n == 0) throw Error(Errc::EmptySelection, "no pixel passes the NDVI condition");
    return stat == LstStat::Mean ? sum / static_cast<double>(n) : mx;
}

double lst_stat_by_ndvi(const Workspace& ws, LstStat stat, std::span<const std::string> lst_paths,
                        std::span<const std::string> ndvi_paths, double threshold, Direction dir) {
    if (lst_paths.size() != ndvi_paths.size())
        throw Error(Errc::PairCountMismatch, std::to_string(lst_paths.size()) + " LST vs " +
                                                 std::to_string(ndvi_paths.size()) +
                                                 " NDVI paths");
    std::vector<Raster> l, v;
    for (std::size_t i = 0; i < lst_paths.size(); ++i) {
        try {
            l.push_back(ws.load(lst_paths[i]));
            v.push_back(ws.load(ndvi_paths[i]));
        } catch (const Error& e) {
            rethrow_with_index(e, i);
        }
    }
    return lst_stat_by_ndvi(stat, l, v, threshold, dir);
}

} // namespace geoagent::inversion
