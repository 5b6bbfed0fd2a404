// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "geoagent/error.hpp"
#include "geoagent/inversion/inversion.hpp"
#include "test_util.hpp"

using namespace geoagent;
using namespace geoagent::inversion;
using raster::Raster;

namespace {

Raster px(double v) { return testutil::row_raster({v}); }

Raster random_raster(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = testutil::uniform(rng, lo, hi);
    return testutil::row_raster(std::move(v));
}

// Reference Planck law with independently written constants (h, c, k_B).
double planck_ref(double wl_um, double t) {
    const double h = 6.62607015e-34, c = 2.99792458e8, k = 1.380649e-23;
    const double wl = wl_um * 1e-6;
    const double b = 2 * h * c * c / (std::pow(wl, 5) * (std::exp(h * c / (wl * k * t)) - 1));
    return b * 1e-6;  // per metre -> per micrometre
}

} // namespace

TEST_CASE("Planck helpers agree with the SI form and invert each other") {
    for (double wl : {8.6, 10.9, 12.0})
        for (double t : {220.0, 300.0, 350.0}) {
            CHECK(planck_radiance(wl, t) == doctest::Approx(planck_ref(wl, t)).epsilon(1e-5));
            CHECK(brightness_temperature(wl, planck_radiance(wl, t)) ==
                  doctest::Approx(t).epsilon(1e-12));
        }
}

TEST_CASE("multi-channel LST worked values") {
    const Raster b31 = px(300), b32 = px(298);
    const auto r = lst_estimate(LstMethod::MultiChannel, {{"band31", &b31}, {"band32", &b32}});
    CHECK(r.lst.data()[0] == double(float(307.97)));

    const Raster t = px(290);
    const auto same = lst_estimate(LstMethod::MultiChannel, {{"band31", &t}, {"band32", &t}});
    CHECK(same.lst.data()[0] == double(float(1.022 * 290 + 0.43)));
}

TEST_CASE("multi-channel LST is affine in both bands") {
    std::mt19937_64 rng(1);
    const Raster x31 = random_raster(rng, 64, 250, 320), x32 = random_raster(rng, 64, 250, 320);
    const Raster y31 = random_raster(rng, 64, 250, 320), y32 = random_raster(rng, 64, 250, 320);
    auto lst = [](const Raster& a, const Raster& b) {
        return lst_estimate(LstMethod::MultiChannel, {{"band31", &a}, {"band32", &b}}).lst;
    };
    Raster s31 = x31, s32 = x32;
    for (std::size_t i = 0; i < 64; ++i) {
        s31.data()[i] += y31.data()[i];
        s32.data()[i] += y32.data()[i];
    }
    const Raster zero = testutil::row_raster(std::vector<double>(64, 0.0));
    const Raster fx = lst(x31, x32), fy = lst(y31, y32), fs = lst(s31, s32), f0 = lst(zero, zero);
    for (std::size_t i = 0; i < 64; ++i)
        CHECK(fs.data()[i] ==
              doctest::Approx(fx.data()[i] + fy.data()[i] - f0.data()[i]).epsilon(1e-6));
}

TEST_CASE("single-channel LST with full vegetation uses the vegetation emissivity") {
    const Raster bt = px(300), red = px(0.05), nir = px(0.6);
    const auto r = lst_estimate(LstMethod::SingleChannel, {{"bt", &bt}, {"red", &red}, {"nir", &nir}});
    const double want = 300.0 / (1.0 + (10.9e-6 * 300.0 / 1.438e-2) * std::log(0.986));
    CHECK(r.lst.data()[0] == doctest::Approx(want).epsilon(1e-7));
    CHECK(ndvi_emissivity(0.1) == 0.973);
    CHECK(ndvi_emissivity(0.35) == doctest::Approx(0.986 * 0.25 + 0.973 * 0.75));
}

TEST_CASE("split window and day/night single-channel") {
    const Raster b31 = px(300), b32 = px(298);
    const auto sw = lst_estimate(LstMethod::SplitWindow, {{"band31", &b31}, {"band32", &b32}});
    CHECK(sw.lst.data()[0] == doctest::Approx(300 + 1.378 * 2 + 0.183 * 4 + 0.268).epsilon(1e-7));

    const Raster day = px(310), night = px(285);
    const auto dn = lst_estimate(LstMethod::ModisDayNight, {{"day", &day}, {"night", &night}});
    REQUIRE(dn.lst.bands() == 2);
    auto corr = [](double bt) { return bt / (1 + (11.03e-6 * bt / 1.438e-2) * std::log(0.98)); };
    CHECK(dn.lst.at(0, 0, 0) == doctest::Approx(corr(310)).epsilon(1e-7));
    CHECK(dn.lst.at(1, 0, 0) == doctest::Approx(corr(285)).epsilon(1e-7));
}

TEST_CASE("TES recovers temperature for a spectrum obeying the MMD relation") {
    const std::vector<double> wl = {8.291, 8.634, 9.075, 10.657, 11.318};
    const std::vector<double> shape = {0.95, 0.955, 0.96, 0.975, 0.98};
    double mean = 0;
    for (double s : shape) mean += s;
    mean /= 5;
    double bmin = 1e9, bmax = -1e9;
    for (double s : shape) {
        bmin = std::min(bmin, s / mean);
        bmax = std::max(bmax, s / mean);
    }
    const double emin = 0.994 - 0.687 * std::pow(bmax - bmin, 0.737);
    const double t_true = 305.0;
    std::vector<Raster> bands;
    for (std::size_t i = 0; i < 5; ++i) {
        const double eps = (shape[i] / mean) * emin / bmin;
        const double rad = eps * planck_radiance(wl[i], t_true);
        bands.push_back(testutil::row_raster({brightness_temperature(wl[i], rad)}));
    }
    Inputs in;
    for (std::size_t i = 0; i < 5; ++i) in["band" + std::to_string(i + 1)] = &bands[i];
    const auto r = lst_estimate(LstMethod::TES, in);
    CHECK(r.nonconverged == 0);
    // Iteration stops once the update is below 1e-4 K; add one f32 step.
    CHECK(std::abs(r.lst.data()[0] - t_true) <= 1e-4 + 3.1e-5);

    Inputs four = in;
    four.erase("band5");
    try {
        (void)lst_estimate(LstMethod::TES, four);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidArgument);
    }
}

TEST_CASE("TTM recovers temperature and flags infeasible pixels") {
    const double wl[] = {9.075, 10.657, 11.318};
    const double mid = (wl[0] + wl[1] + wl[2]) / 3;
    const double t_true = 297.5, e = 0.955, g = 0.012;
    std::vector<double> v[3];
    for (int i = 0; i < 3; ++i) {
        const double eps = e + g * (wl[i] - mid);
        v[i].push_back(brightness_temperature(wl[i], eps * planck_radiance(wl[i], t_true)));
        v[i].push_back(250.0 + 40.0 * i);  // implies emissivities far outside (0.8, 1]
    }
    Raster b1(2, 1, 1, raster::DataType::F32, v[0]), b2(2, 1, 1, raster::DataType::F32, v[1]),
        b3(2, 1, 1, raster::DataType::F32, v[2]);
    const auto r = lst_estimate(LstMethod::TTM, {{"band1", &b1}, {"band2", &b2}, {"band3", &b3}});
    // The output is f32; the solve itself is exact on noise-free input.
    CHECK(r.lst.data()[0] == double(float(t_true)));
    CHECK(std::isnan(r.lst.data()[1]));
    CHECK(r.nonconverged == 1);
}

TEST_CASE("apparent thermal inertia") {
    const Raster a = testutil::row_raster({0.2, 1.0, 0.3, 0.3});
    const Raster d = testutil::row_raster({310, 305, 300, 290});
    const Raster n = testutil::row_raster({290, 290, 300, 300});
    const Raster r = ati(a, d, n);
    CHECK(r.data()[0] == doctest::Approx(0.04).epsilon(1e-6));
    CHECK(r.data()[1] == 0.0);
    CHECK(std::isnan(r.data()[2]));
    CHECK(std::isnan(r.data()[3]));
}

TEST_CASE("polarization ratio, differences and Chang") {
    const Raster v = px(260), h = px(240);
    CHECK(microwave_invert(MicrowaveMethod::PolarizationRatio, {{"v", &v}, {"h", &h}}).data()[0] ==
          doctest::Approx(0.04).epsilon(1e-6));

    const Raster b1 = px(10), b2 = px(7);
    CHECK(microwave_invert(MicrowaveMethod::DualFreqDiff, {{"band1", &b1}, {"band2", &b2}},
                           {{"alpha", 2}, {"beta", 1}})
              .data()[0] == 7.0);
    CHECK(microwave_invert(MicrowaveMethod::DualFreqDiff, {{"band1", &b1}, {"band2", &b1}},
                           {{"alpha", 3.5}, {"beta", -2}})
              .data()[0] == -2.0);
    CHECK(microwave_invert(MicrowaveMethod::DPDM, {{"v", &v}, {"h", &h}}).data()[0] == 20.0);

    const Raster t18 = px(250), t37 = px(230);
    CHECK(microwave_invert(MicrowaveMethod::Chang, {{"18h", &t18}, {"37h", &t37}}).data()[0] ==
          doctest::Approx(31.8).epsilon(1e-6));

    const Raster b3 = px(4);
    CHECK(microwave_invert(MicrowaveMethod::MultiFreqBT,
                           {{"band1", &b1}, {"band2", &b2}, {"band3", &b3}})
              .data()[0] == doctest::Approx(7.0));

    try {
        (void)microwave_invert(MicrowaveMethod::DPDM, {{"v", &v}, {"h", &h}}, {{"gamma", 1}});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidArgument);
    }
    try {
        (void)microwave_invert(MicrowaveMethod::Chang, {{"18h", &t18}});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::MissingBandRole);
    }
}

TEST_CASE("polarization ratio is bounded and antisymmetric") {
    std::mt19937_64 rng(8);
    const Raster v = random_raster(rng, 200, 1, 300), h = random_raster(rng, 200, 1, 300);
    const Raster a = microwave_invert(MicrowaveMethod::PolarizationRatio, {{"v", &v}, {"h", &h}});
    const Raster b = microwave_invert(MicrowaveMethod::PolarizationRatio, {{"v", &h}, {"h", &v}});
    for (std::size_t i = 0; i < 200; ++i) {
        CHECK(a.data()[i] > -1.0);
        CHECK(a.data()[i] < 1.0);
        CHECK(a.data()[i] == -b.data()[i]);
    }
}

TEST_CASE("NASA Team recovers linear tie-point mixtures") {
    const auto tp = default_coefficients(MicrowaveMethod::NasaTeamSIC);
    auto mix = [&](const char* ch, double fy, double my) {
        const std::string c = ch;
        return (1 - fy - my) * tp.at("ow_" + c) + fy * tp.at("fy_" + c) + my * tp.at("my_" + c);
    };
    std::mt19937_64 rng(12);
    std::vector<double> h19, v19, v37, want;
    const double fixed[][2] = {{0, 0}, {1, 0}, {0, 1}, {0.5, 0}};
    for (auto& f : fixed) {
        h19.push_back(mix("19h", f[0], f[1]));
        v19.push_back(mix("19v", f[0], f[1]));
        v37.push_back(mix("37v", f[0], f[1]));
        want.push_back(100 * (f[0] + f[1]));
    }
    for (int i = 0; i < 50; ++i) {
        const double fy = testutil::uniform(rng, 0, 1), my = testutil::uniform(rng, 0, 1 - fy);
        h19.push_back(mix("19h", fy, my));
        v19.push_back(mix("19v", fy, my));
        v37.push_back(mix("37v", fy, my));
        want.push_back(100 * (fy + my));
    }
    // Kept in double: f32 storage of the brightness temperatures would
    // dominate the comparison.
    const std::size_t n = want.size();
    Raster rh(n, 1, 1, raster::DataType::F32, h19), rv(n, 1, 1, raster::DataType::F32, v19),
        r37(n, 1, 1, raster::DataType::F32, v37);
    const Raster c =
        microwave_invert(MicrowaveMethod::NasaTeamSIC, {{"19h", &rh}, {"19v", &rv}, {"37v", &r37}});
    CHECK(c.data()[0] == 0.0);
    CHECK(c.data()[1] == doctest::Approx(100.0).epsilon(1e-6));
    CHECK(c.data()[2] == doctest::Approx(100.0).epsilon(1e-6));
    CHECK(c.data()[3] == doctest::Approx(50.0).epsilon(1e-6));
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(c.data()[i] >= 0.0);
        CHECK(c.data()[i] <= 100.0);
        CHECK(c.data()[i] == doctest::Approx(want[i]).epsilon(1e-5).scale(100));
    }
}

TEST_CASE("PWV band ratio") {
    const Raster a = testutil::row_raster({0.5, 0.5, 0.4, 0.2});
    const Raster w = testutil::row_raster({0.5, 0.0, 0.5, 0.5});
    const Raster p = pwv_band_ratio(a, w);
    CHECK(p.data()[0] == doctest::Approx(std::pow(0.02 / 0.651, 2)).epsilon(1e-6));
    CHECK(p.data()[0] == doctest::Approx(9.44e-4).epsilon(1e-3));
    CHECK(std::isnan(p.data()[1]));
    CHECK(p.data()[3] > p.data()[2]);

    std::mt19937_64 rng(4);
    const Raster x = random_raster(rng, 300, 0.01, 1), y = random_raster(rng, 300, 0.01, 1);
    const Raster win = testutil::row_raster(std::vector<double>(300, 1.0));
    const Raster px_ = pwv_band_ratio(x, win), py = pwv_band_ratio(y, win);
    for (std::size_t i = 0; i < 300; ++i) {
        if (x.data()[i] < y.data()[i]) CHECK(px_.data()[i] >= py.data()[i]);
        if (x.data()[i] > y.data()[i]) CHECK(px_.data()[i] <= py.data()[i]);
    }
}

TEST_CASE("turbidity") {
    const Raster r = testutil::row_raster({0.0, 0.05, 0.25, -0.1});
    const Raster t = turbidity_ntu(r);
    CHECK(t.data()[0] == 0.0);
    CHECK(t.data()[1] == doctest::Approx(228.1 * 0.05 / (1 - 0.05 / 0.1641)).epsilon(1e-6));
    CHECK(t.data()[1] == doctest::Approx(16.40).epsilon(1e-3));
    CHECK(std::isnan(t.data()[2]));
    CHECK(std::isnan(t.data()[3]));
    const Raster pole = turbidity_ntu(px(0.25), {{"C", 0.25}});
    CHECK(std::isnan(pole.data()[0]));
}

TEST_CASE("LST statistics by NDVI") {
    std::mt19937_64 rng(6);
    std::vector<Raster> lst, ndvi;
    for (int i = 0; i < 2; ++i) {
        lst.push_back(random_raster(rng, 50, 280, 320));
        ndvi.push_back(random_raster(rng, 50, -0.2, 0.9));
    }
    double sum = 0, mx = -1;
    std::size_t n = 0;
    for (int p = 0; p < 2; ++p)
        for (std::size_t i = 0; i < 50; ++i)
            if (ndvi[p].data()[i] > 0.3) {
                sum += lst[p].data()[i];
                mx = std::max(mx, lst[p].data()[i]);
                ++n;
            }
    CHECK(lst_stat_by_ndvi(LstStat::Mean, lst, ndvi, 0.3, Direction::Above) ==
          doctest::Approx(sum / double(n)).epsilon(1e-12));
    CHECK(lst_stat_by_ndvi(LstStat::Max, lst, ndvi, 0.3, Direction::Above) == mx);

    const std::span<const Raster> one_l(lst.data(), 1), one_n(ndvi.data(), 1);
    double all = 0;
    for (double v : lst[0].data()) all += v;
    CHECK(lst_stat_by_ndvi(LstStat::Mean, one_l, one_n, -1.0, Direction::Above) ==
          doctest::Approx(all / 50).epsilon(1e-12));
    try {
        (void)lst_stat_by_ndvi(LstStat::Mean, lst, ndvi, 5.0, Direction::Above);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EmptySelection);
    }
    try {
        (void)lst_stat_by_ndvi(LstStat::Mean, lst, one_n, 0.0, Direction::Below);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::PairCountMismatch);
    }
}
