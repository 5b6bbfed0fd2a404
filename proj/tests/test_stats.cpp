// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "geoagent/error.hpp"
#include "geoagent/raster/io.hpp"
#include "geoagent/stats/descriptive.hpp"
#include "geoagent/stats/landsat.hpp"
#include "geoagent/stats/threshold.hpp"
#include "geoagent/stats/utility.hpp"
#include "test_util.hpp"

using namespace geoagent;
using namespace geoagent::stats;
using raster::DataType;
using raster::Raster;
using testutil::TempDir;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class F>
Errc code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return Errc::Internal;
}

// Textbook two-pass population moments.
struct Ref {
    double mean, sd, skew, kurt;
};
Ref reference_moments(const std::vector<double>& x) {
    const double n = double(x.size());
    double mean = 0;
    for (double v : x) mean += v;
    mean /= n;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double v : x) {
        const double d = v - mean;
        m2 += d * d / n;
        m3 += d * d * d / n;
        m4 += d * d * d * d / n;
    }
    return {mean, std::sqrt(m2), m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3};
}

double sorted_percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q / 100 * double(v.size() - 1);
    const std::size_t lo = std::size_t(pos);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + (v[lo + 1] - v[lo]) * (pos - double(lo));
}

struct Fixture {
    TempDir dir;
    raster::Workspace ws{dir.path()};
    std::string put(const std::string& rel, const Raster& r) {
        testutil::write_raster(dir / rel, r);
        return rel;
    }
};

} // namespace

// ---- scalar statistics ---------------------------------------------------

TEST_CASE("scalar statistics worked values") {
    const std::vector<double> a = {2, 4, 6};
    CHECK(scalar_stat(a, ScalarStat::Mean) == 4.0);
    const std::vector<double> s = {1, 2, 3};
    CHECK(scalar_stat(s, ScalarStat::Skewness) == 0.0);
    const std::vector<double> k = {1, 2, 3, 4};
    CHECK(scalar_stat(k, ScalarStat::Kurtosis) == doctest::Approx(-1.36));
    CHECK(scalar_stat(a, ScalarStat::CV) == doctest::Approx(std::sqrt(8.0 / 3.0) / 4.0));
}

TEST_CASE("kurtosis of a large normal sample is near zero") {
    testutil::Normal g(12345);
    std::vector<double> x(20000);
    for (double& v : x) v = 3 + 2 * g();
    const Ref ref = reference_moments(x);
    const double k = scalar_stat(x, ScalarStat::Kurtosis);
    CHECK(k == doctest::Approx(ref.kurt).epsilon(1e-9));
    CHECK(std::abs(k) < 0.2);
    CHECK(scalar_stat(x, ScalarStat::Skewness) == doctest::Approx(ref.skew).epsilon(1e-8).scale(1));
}

TEST_CASE("cv is scale invariant") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> x(30), y(30);
        const double c = testutil::uniform(rng, 0.1, 50);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = testutil::uniform(rng, 1, 10);
            y[i] = c * x[i];
        }
        CHECK(scalar_stat(y, ScalarStat::CV) ==
              doctest::Approx(scalar_stat(x, ScalarStat::CV)).epsilon(1e-12));
    }
}

TEST_CASE("scalar statistic preconditions") {
    const std::vector<double> zero_mean = {-1, 1};
    CHECK(code_of([&] { (void)scalar_stat(zero_mean, ScalarStat::CV); }) == Errc::ZeroMean);
    const std::vector<double> flat = {2, 2, 2, 2};
    CHECK(code_of([&] { (void)scalar_stat(flat, ScalarStat::Skewness); }) == Errc::ZeroVariance);
    CHECK(code_of([&] { (void)scalar_stat(flat, ScalarStat::Kurtosis); }) == Errc::ZeroVariance);
    const std::vector<double> three = {1, 2, 3};
    CHECK(code_of([&] { (void)scalar_stat(three, ScalarStat::Kurtosis); }) == Errc::TooShort);
    CHECK(code_of([] { (void)scalar_stat({}, ScalarStat::Mean); }) == Errc::EmptyList);
}

TEST_CASE("median and percentile conventions") {
    CHECK(median({1, 2, 3, 4}) == 2.5);
    CHECK(median({3, 1, 2}) == 2.0);
    CHECK(percentile({1, 2, 3, 4}, 50) == 2.5);
    std::mt19937_64 rng(8);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> v(1 + rng() % 40);
        for (double& x : v) x = testutil::uniform(rng, -100, 100);
        CHECK(percentile(v, 0) == *std::min_element(v.begin(), v.end()));
        CHECK(percentile(v, 100) == *std::max_element(v.begin(), v.end()));
        const double q = testutil::uniform(rng, 0, 100);
        CHECK(percentile(v, q) == doctest::Approx(sorted_percentile(v, q)).epsilon(1e-12));
    }
    CHECK(code_of([] { (void)percentile({1.0}, 101); }) == Errc::InvalidArgument);
}

// ---- batch image statistics ----------------------------------------------

TEST_CASE("batch image statistic worked values") {
    Fixture f;
    const std::vector<std::string> paths = {f.put("a.tif", testutil::row_raster({3})),
                                            f.put("b.tif", testutil::row_raster({5}))};
    CHECK(batch_image_stat(f.ws, paths, ImageStat::Mean) == std::vector<double>{3, 5});
    const std::vector<std::string> one = {f.put("m.tif", testutil::row_raster({4, 1, 3, 2}))};
    CHECK(batch_image_stat(f.ws, one, ImageStat::Median) == std::vector<double>{2.5});
}

TEST_CASE("batch image statistics equal the flatten-and-compute oracle") {
    Fixture f;
    std::mt19937_64 rng(19);
    std::vector<std::string> paths;
    std::vector<std::vector<double>> dense;
    for (int i = 0; i < 4; ++i) {
        Raster r(7, 5, 2, DataType::F32);
        for (double& v : r.data()) v = rng() % 6 == 0 ? -9999.0 : double(float(testutil::uniform(rng, -3, 9)));
        r.set_nodata(-9999.0);
        paths.push_back(f.put("img" + std::to_string(i) + ".tif", r));
        dense.push_back(r.valid_values(1));
    }
    for (ImageStat s : {ImageStat::Mean, ImageStat::Std, ImageStat::Median, ImageStat::Min,
                        ImageStat::Max, ImageStat::Skewness, ImageStat::Kurtosis, ImageStat::Sum}) {
        CAPTURE(image_stat_name(s));
        const auto got = batch_image_stat(f.ws, paths, s, 1);
        REQUIRE(got.size() == dense.size());
        for (std::size_t i = 0; i < dense.size(); ++i) {
            const auto& d = dense[i];
            const Ref ref = reference_moments(d);
            double want = 0;
            switch (s) {
            case ImageStat::Mean: want = ref.mean; break;
            case ImageStat::Std: want = ref.sd; break;
            case ImageStat::Median: want = sorted_percentile(d, 50); break;
            case ImageStat::Min: want = *std::min_element(d.begin(), d.end()); break;
            case ImageStat::Max: want = *std::max_element(d.begin(), d.end()); break;
            case ImageStat::Skewness: want = ref.skew; break;
            case ImageStat::Kurtosis: want = ref.kurt; break;
            case ImageStat::Sum:
                for (double v : d) want += v;
                break;
            }
            CHECK(got[i] == doctest::Approx(want).epsilon(1e-10).scale(1));
        }
    }
    CHECK(code_of([&] { (void)batch_image_stat(f.ws, paths, ImageStat::Mean, 2); }) ==
          Errc::BandOutOfRange);
    auto broken = paths;
    broken[2] = "nope.tif";
    try {
        (void)batch_image_stat(f.ws, broken, ImageStat::Mean);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::MissingFile);
        CHECK(e.item_index() == 2u);
    }
    CHECK(code_of([&] { (void)batch_image_stat(f.ws, {}, ImageStat::Mean); }) == Errc::EmptyBatch);
}

TEST_CASE("batch aggregates compose the per-image statistics") {
    Fixture f;
    const std::vector<std::string> two = {f.put("a.tif", testutil::row_raster({0, 2})),
                                          f.put("b.tif", testutil::row_raster({2, 4}))};
    CHECK(batch_mean_of_means(f.ws, two) == 2.0);
    CHECK(batch_max_of_means(f.ws, two) == 3.0);

    const std::vector<std::string> ranges = {
        f.put("r0.tif", testutil::row_raster({0, 1, 2, 3, 4, 5})),
        f.put("r1.tif", testutil::row_raster({2, 9, 4}))};
    const auto t = batch_mean_max_min(f.ws, ranges);
    CHECK(t.mean_of_means == doctest::Approx((2.5 + 5.0) / 2));
    CHECK(t.max_of_maxes == 9.0);
    CHECK(t.min_of_mins == 0.0);

    const std::vector<std::string> single = {ranges[1]};
    const auto s = batch_mean_max_min(f.ws, single);
    CHECK(s.mean_of_means == 5.0);
    CHECK(batch_mean_of_means(f.ws, single) == 5.0);
    CHECK(batch_max_of_means(f.ws, single) == 5.0);
    CHECK(s.max_of_maxes == 9.0);
    CHECK(s.min_of_mins == 2.0);
}

// ---- threshold queries ---------------------------------------------------

TEST_CASE("hotspot percentage and map follow their own comparators") {
    const Raster r = testutil::row_raster({1, 5, 9});
    CHECK(hotspot_percentage(r, 5) == doctest::Approx(100.0 / 3));
    Raster g = r;
    g.set_geo(testutil::sample_georef());
    const Raster m = hotspot_map(g, 5);
    CHECK(m.dtype() == DataType::U8);
    CHECK(std::vector<double>(m.data().begin(), m.data().end()) == std::vector<double>{1, 0, 0});
    CHECK(m.geo() == g.geo());
}

TEST_CASE("multi-band joint condition equals the per-pixel AND oracle") {
    std::mt19937_64 rng(23);
    Raster r(9, 8, 3, DataType::F32);
    for (double& v : r.data()) v = double(float(testutil::uniform(rng, 0, 1)));
    r.data()[5] = kNaN;
    const std::vector<Condition> conds = {{0, Compare::Greater, 0.3},
                                          {1, Compare::LessEqual, 0.7},
                                          {2, Compare::GreaterEqual, 0.2}};
    std::size_t valid = 0, sel = 0;
    for (std::size_t px = 0; px < r.pixels(); ++px) {
        const double a = r.at(0, px / 9, px % 9), b = r.at(1, px / 9, px % 9),
                     c = r.at(2, px / 9, px % 9);
        if (std::isnan(a) || std::isnan(b) || std::isnan(c)) continue;
        ++valid;
        sel += a > 0.3 && b <= 0.7 && c >= 0.2;
    }
    const auto got = count_conditions(r, conds);
    CHECK(got.valid == valid);
    CHECK(got.selected == sel);
    const Raster m = condition_mask(r, conds);
    double ones = 0;
    for (double v : m.data()) ones += v;
    CHECK(ones == double(sel));

    const std::vector<Condition> bad = {{3, Compare::Greater, 0}};
    CHECK(code_of([&] { (void)count_conditions(r, bad); }) == Errc::ConditionBandMissing);
    CHECK(code_of([&] { (void)count_conditions(r, {}); }) == Errc::InvalidArgument);
}

TEST_CASE("comparator parsing") {
    CHECK(parse_comparator(">") == Compare::Greater);
    CHECK(parse_comparator("<=") == Compare::LessEqual);
    CHECK(parse_comparator("≥") == Compare::GreaterEqual);
    CHECK(code_of([] { (void)parse_comparator("=="); }) == Errc::InvalidArgument);
}

TEST_CASE("batch threshold kinds") {
    Fixture f;
    const std::vector<std::string> paths = {
        f.put("a.tif", testutil::row_raster({1, 2, 3, 4})),     // 50% above 2.5
        f.put("b.tif", testutil::row_raster({5, 6, 7, 8})),     // 100%
        f.put("c.tif", testutil::row_raster({0, 0, 0, 10}))};   // 25%
    const auto pct = batch_hotspot_percentage(f.ws, paths, 2.5);
    CHECK(pct == std::vector<double>{50, 100, 25});
    CHECK(threshold_ratio(f.ws, paths, 2.5) == doctest::Approx(175.0 / 3));
    CHECK(count_images_exceeding_ratio(f.ws, paths, 2.5, 40) == 2);
    CHECK(count_images_exceeding_ratio(f.ws, paths, 2.5, 40, Side::Below) == 2);
    CHECK(average_ratio_exceeding(f.ws, paths, 2.5, 40) == 75.0);
    CHECK(code_of([&] { (void)average_ratio_exceeding(f.ws, paths, 2.5, 100); }) ==
          Errc::EmptySelection);

    // means 2.5, 6.5, 2.5; global 23/6.
    const auto mt = images_mean_vs_threshold(f.ws, paths, 3);
    CHECK(mt.count == 1);
    CHECK(mt.percentage == doctest::Approx(100.0 / 3));
    CHECK(count_images_vs_mean_multiplier(f.ws, paths, 1.0) == 1);
    CHECK(count_images_vs_mean_multiplier(f.ws, paths, 1.0, Side::Below) == 2);
    CHECK(batch_fire_pixels(f.ws, paths, 4) == std::vector<std::size_t>{0, 4, 1});

    const auto maps = batch_hotspot_tif(f.ws, paths, 2.5, "hot");
    REQUIRE(maps.size() == 3);
    CHECK(maps[1].filename() == "hotspot_b.tif");
    const Raster m0 = raster::load_raster(maps[0]);
    CHECK(std::vector<double>(m0.data().begin(), m0.data().end()) ==
          std::vector<double>{1, 1, 0, 0});

    for (double p : pct) {
        CHECK(p >= 0);
        CHECK(p <= 100);
    }
}

TEST_CASE("fire maps") {
    const Raster before = testutil::row_raster({1, 1, 1, kNaN});
    const Raster after = testutil::row_raster({1, 3, 5, 9});
    const Raster inc = fire_increase_map(before, after, 2);
    CHECK(std::vector<double>(inc.data().begin(), inc.data().end()) ==
          std::vector<double>{0, 0, 1, 0});

    const Raster freq = testutil::row_raster({0, 1, 2, 3, 4});
    const Raster prone = fire_prone_areas(freq, 50);
    CHECK(std::vector<double>(prone.data().begin(), prone.data().end()) ==
          std::vector<double>{0, 0, 0, 1, 1});
}

TEST_CASE("conditional band statistics") {
    const Raster target = testutil::row_raster({2, 4, 6, 8});
    const Raster cond = testutil::row_raster({1, 2, 3, 4});
    CHECK(band_mean_by_condition(target, 0, cond, 0, Compare::GreaterEqual, 0) == 5.0);
    CHECK(band_mean_by_condition(target, 0, cond, 0, Compare::Greater, 2) == 7.0);
    CHECK(code_of([&] { (void)band_mean_by_condition(target, 0, cond, 0, Compare::Greater, 9); }) ==
          Errc::EmptySelection);
    CHECK(code_of([&] {
              (void)band_mean_by_condition(target, 0, testutil::row_raster({1}), 0,
                                           Compare::Greater, 0);
          }) == Errc::ShapeMismatch);
    CHECK(code_of([&] { (void)band_mean_by_condition(target, 0, cond, 1, Compare::Greater, 0); }) ==
          Errc::ConditionBandMissing);

    CHECK(intersection_percentage(cond, Compare::Greater, 2, cond, Compare::Less, 2) == 0.0);
    CHECK(intersection_percentage(cond, Compare::Greater, 1, target, Compare::Less, 8) == 50.0);

    std::mt19937_64 rng(2);
    std::vector<double> g(50), v(50);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = double(float(testutil::uniform(rng, 0, 1)));
        v[i] = double(float(testutil::uniform(rng, 10, 20)));
    }
    double s = 0, n = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g[i] > 0.4) {
            s += v[i];
            n += 1;
        }
    CHECK(threshold_value_mean(testutil::row_raster(g), testutil::row_raster(v), 0.4) ==
          doctest::Approx(s / n).epsilon(1e-12));

    const Raster num = testutil::row_raster({2, 6, 5});
    const Raster den = testutil::row_raster({1, 3, 0});
    CHECK(image_division_mean(num, 0, den, 0) == 2.0);
}

// ---- scalar and image utilities ------------------------------------------

TEST_CASE("scalar utilities") {
    CHECK(kelvin_to_celsius(273.15) == 0.0);
    CHECK(celsius_to_kelvin(0) == 273.15);
    CHECK(percentage_change(50, 75) == 50.0);
    CHECK(percentage_change(-50, -25) == 50.0);
    CHECK(difference(3, 10) == 7.0);
    CHECK(multiply(3, 4) == 12.0);
    CHECK(ceil_number(2.1) == 3.0);
    CHECK(division(9, 3) == 3.0);
    CHECK(code_of([] { (void)division(1, 0); }) == Errc::DivisionByZero);
    CHECK(code_of([] { (void)percentage_change(0, 1); }) == Errc::ZeroBase);

    const std::vector<double> xs = {3, 9, 1, 9};
    const auto mx = max_with_index(xs);
    CHECK(mx.value == 9);
    CHECK(mx.index == 1);
    const auto mn = min_with_index(xs);
    CHECK(mn.value == 1);
    CHECK(mn.index == 2);
    CHECK(code_of([] { (void)max_with_index({}); }) == Errc::EmptyList);

    const std::vector<long long> idx = {2, 0, -1};
    CHECK(select_indexes<double>(xs, idx) == std::vector<double>{1, 3, 9});
    const std::vector<long long> out_of_range = {4};
    CHECK(code_of([&] { (void)select_indexes<double>(xs, out_of_range); }) ==
          Errc::InvalidArgument);
}

TEST_CASE("image utilities") {
    const Raster q = testutil::row_raster({4, 1, 3, 2});
    CHECK(percentile_value(q, 50) == 2.5);
    CHECK(percentile_value(q, 0) == 1.0);
    CHECK(percentile_value(q, 100) == 4.0);
    CHECK(nonzero_area(testutil::row_raster({0, 0, 0})) == 0);
    CHECK(nonzero_area(testutil::row_raster({0, 2, kNaN, -1})) == 2);

    std::mt19937_64 rng(6);
    std::vector<double> a(20), b(20);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = double(float(testutil::uniform(rng, -5, 5)));
        b[i] = double(float(testutil::uniform(rng, -5, 5)));
    }
    const Raster ra = testutil::row_raster(a), rb = testutil::row_raster(b);
    const Raster d1 = tif_difference(ra, rb), d2 = tif_difference(rb, ra);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(d1.data()[i] == -d2.data()[i]);
        CHECK(d1.data()[i] == double(float(b[i] - a[i])));
    }
    const Raster s = subtract(ra, rb);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(s.data()[i] == d2.data()[i]);
}

TEST_CASE("colormap lookup") {
    const auto& lut = colormap_table();
    CHECK(lut[0].r == 68);
    CHECK(lut[0].b == 84);
    CHECK(lut[255].r == 253);
    CHECK(lut[255].g == 231);
    Raster g(3, 1, 1, DataType::U8, {0, 128, 255});
    const Raster rgb = grayscale_to_colormap(g);
    CHECK(rgb.bands() == 3);
    CHECK(rgb.dtype() == DataType::U8);
    CHECK(rgb.at(0, 0, 2) == lut[255].r);
    CHECK(rgb.at(1, 0, 1) == lut[128].g);
    // Float input is stretched over its own range.
    const Raster rf = grayscale_to_colormap(testutil::row_raster({10, 20, kNaN}));
    CHECK(rf.at(2, 0, 0) == lut[0].b);
    CHECK(rf.at(2, 0, 1) == lut[255].b);
    CHECK(rf.at(0, 0, 2) == 0);
}

TEST_CASE("file listing is sorted and filtered") {
    TempDir dir;
    raster::Workspace ws(dir.path());
    fs::create_directories(dir / "d");
    fs::create_directories(dir / "empty");
    fs::create_directories(dir / "d/sub");
    for (const char* n : {"b.tif", "a.tif", "a.json"}) std::ofstream(dir / "d" / n) << "x";
    CHECK(get_filelist(ws, "d") == std::vector<std::string>{"a.json", "a.tif", "b.tif"});
    CHECK(get_filelist(ws, "d", std::string("*.tif")) == std::vector<std::string>{"a.tif", "b.tif"});
    CHECK(get_filelist(ws, "empty").empty());
    CHECK(code_of([&] { (void)get_filelist(ws, "none"); }) == Errc::MissingDirectory);
}

// ---- Landsat preprocessing -----------------------------------------------

TEST_CASE("surface reflectance scaling") {
    const Raster dn(3, 1, 1, DataType::U16, {7273, 43636, 21818});
    const Raster sr = radiometric_correction_sr(dn);
    CHECK(sr.dtype() == DataType::F32);
    CHECK(sr.data()[0] == double(float(2.75e-5 * 7273 - 0.2)));
    CHECK(sr.data()[0] == doctest::Approx(0.0).epsilon(1e-4).scale(1));
    CHECK(sr.data()[1] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(sr.data()[2] == doctest::Approx(0.4).epsilon(1e-4));
    const Raster extremes = radiometric_correction_sr(Raster(2, 1, 1, DataType::U16, {1, 65535}));
    CHECK(extremes.data()[0] == 0.0);
    CHECK(extremes.data()[1] == 1.0);
    CHECK(code_of([] { (void)radiometric_correction_sr(testutil::row_raster({1})); }) ==
          Errc::WrongDtype);
}

TEST_CASE("cloud mask uses the QA bit layout") {
    const Raster band = testutil::row_raster({0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
    const Raster clear(6, 1, 1, DataType::U16, {0, 0, 0, 0, 0, 0});
    const Raster same = apply_cloud_mask(band, clear);
    for (std::size_t i = 0; i < 6; ++i) CHECK(same.data()[i] == band.data()[i]);

    // fill, dilated cloud, cirrus, cloud, shadow, snow
    const Raster qa(6, 1, 1, DataType::U16, {1, 2, 4, 8, 16, 32});
    const Raster once = apply_cloud_mask(band, qa);
    CHECK(once.data()[0] == band.data()[0]);
    for (std::size_t i = 1; i <= 4; ++i) CHECK(std::isnan(once.data()[i]));
    CHECK(once.data()[5] == band.data()[5]);
    CHECK(apply_cloud_mask(once, qa) == once);

    CHECK(code_of([&] { (void)apply_cloud_mask(band, band); }) == Errc::WrongDtype);
    CHECK(code_of([&] {
              (void)apply_cloud_mask(band, Raster(2, 1, 1, DataType::U16, {0, 0}));
          }) == Errc::ShapeMismatch);
}
