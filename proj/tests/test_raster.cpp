// SPDX-License-Identifier: Apache-2.0
#include <cstring>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "geoagent/error.hpp"
#include "geoagent/raster/io.hpp"
#include "geoagent/raster/pixelwise.hpp"
#include "geoagent/raster/workspace.hpp"
#include "test_util.hpp"

using namespace geoagent;
using namespace geoagent::raster;
using testutil::TempDir;
namespace fs = std::filesystem;

namespace {

} // namespace

TEST_CASE("load_raster reads a 2x2 f32 file") {
    TempDir dir;
    const auto p = testutil::write_raster(dir / "a.tif", testutil::f32_raster(2, 2, {1, 2, 3, 4}));
    const Raster r = load_raster(p);
    CHECK(r.width() == 2);
    CHECK(r.height() == 2);
    CHECK(r.bands() == 1);
    CHECK(r.dtype() == DataType::F32);
    CHECK(std::vector<double>(r.data().begin(), r.data().end()) == std::vector<double>{1, 2, 3, 4});
}

TEST_CASE("load_raster on a missing path raises MissingFile") {
    try {
        (void)load_raster("/definitely/not/here.tif");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::MissingFile);
    }
}

TEST_CASE("round trip over random rasters, raw and deflate") {
    TempDir dir;
    std::mt19937_64 rng(7);
    for (int i = 0; i < 60; ++i) {
        const Raster r = testutil::random_raster(rng);
        const auto comp = i % 2 ? Compression::Deflate : Compression::None;
        const auto p = dir / ("r" + std::to_string(i) + ".tif");
        write_tiff(r, p, {comp});
        const Raster back = load_raster(p);
        CHECK(back == r);
    }
}

TEST_CASE("GeoRef bytes survive save and load") {
    TempDir dir;
    Raster r = testutil::f32_raster(3, 2, {1, 2, 3, 4, 5, 6});
    r.set_geo(testutil::sample_georef());
    const auto p = testutil::write_raster(dir / "g.tif", r);
    const Raster back = load_raster(p);
    REQUIRE(back.geo().tags.size() == 4);
    CHECK(back.geo() == r.geo());
    REQUIRE(back.geo().affine.has_value());
    CHECK(back.geo().affine->origin_x == doctest::Approx(500000.0));
    CHECK(back.geo().affine->pixel_y == doctest::Approx(-30.0));
}

TEST_CASE("chunky big-endian TIFF is decoded") {
    // Hand-assembled MM file: 2x1, two u16 samples per pixel, chunky.
    std::string f;
    auto be16 = [&](int v) { f.push_back(char(v >> 8)); f.push_back(char(v & 0xff)); };
    auto be32 = [&](long v) { for (int s = 24; s >= 0; s -= 8) f.push_back(char((v >> s) & 0xff)); };
    f += "MM";
    be16(42);
    be32(8);
    const int n = 9;
    be16(n);
    auto entry = [&](int tag, int type, long count, long value, bool short_value) {
        be16(tag); be16(type); be32(count);
        if (short_value) { be16(int(value)); be16(0); } else be32(value);
    };
    const long data_at = 8 + 2 + n * 12 + 4;
    entry(256, 3, 1, 2, true);
    entry(257, 3, 1, 1, true);
    entry(258, 3, 2, (16 << 16) | 16, false);  // two shorts packed inline
    entry(259, 3, 1, 1, true);
    entry(262, 3, 1, 1, true);
    entry(273, 4, 1, data_at, false);
    entry(277, 3, 1, 2, true);
    entry(278, 3, 1, 1, true);
    entry(279, 4, 1, 8, false);
    be32(0);
    be16(100); be16(200); be16(300); be16(400);
    const Raster r = decode_tiff(f);
    CHECK(r.bands() == 2);
    CHECK(r.dtype() == DataType::U16);
    CHECK(r.at(0, 0, 0) == 100);
    CHECK(r.at(1, 0, 0) == 200);
    CHECK(r.at(0, 0, 1) == 300);
    CHECK(r.at(1, 0, 1) == 400);
}

TEST_CASE("unsupported and corrupt TIFFs are classified") {
    Raster r = testutil::f32_raster(2, 2, {1, 2, 3, 4});
    std::string bytes = encode_tiff(r);
    SUBCASE("truncated strip") {
        bytes.resize(bytes.size() - 3);
        CHECK_THROWS_AS(decode_tiff(bytes), Error);
        try { decode_tiff(bytes); } catch (const Error& e) { CHECK(e.code() == Errc::CorruptFile); }
    }
    SUBCASE("bigtiff") {
        bytes[2] = 43;
        try { decode_tiff(bytes); FAIL("expected throw"); } catch (const Error& e) { CHECK(e.code() == Errc::UnsupportedLayout); }
    }
    SUBCASE("garbage") {
        try { decode_tiff("hello world"); FAIL("expected throw"); } catch (const Error& e) { CHECK(e.code() == Errc::CorruptFile); }
    }
}

TEST_CASE("PNG gray and RGB load as u8 rasters") {
    TempDir dir;
    Raster rgb(2, 2, 3, DataType::U8, {1, 2, 3, 4, 10, 20, 30, 40, 100, 110, 120, 130});
    write_png(rgb, dir / "x.png");
    const Raster back = load_raster(dir / "x.png");
    CHECK(back.bands() == 3);
    CHECK(back == rgb);
}

TEST_CASE("workspace output containment") {
    TempDir dir;
    Workspace ws(dir.path());
    const Raster r = testutil::f32_raster(1, 1, {0.5});
    const std::string msg = ws.save(r, "q1/out.tif");
    CHECK(msg == "Result saved at " + (fs::weakly_canonical(dir.path()) / "q1/out.tif").string());
    CHECK(fs::exists(dir / "q1/out.tif"));
    try {
        (void)ws.save(r, "../../etc/x.tif");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::PathEscapesWorkspace);
    }
    CHECK_THROWS_AS(ws.resolve_output("/etc/passwd"), Error);
    CHECK_THROWS_AS(ws.resolve_output("a/../../b.tif"), Error);
    CHECK(ws.load("q1/out.tif") == r);
}

TEST_CASE("workspace input lookup falls back to the data root") {
    TempDir out, data;
    testutil::write_row(data / "d/in.tif", {1, 2});
    Workspace ws(out.path(), data.path());
    CHECK(fs::equivalent(ws.resolve_input("d/in.tif"), data / "d/in.tif"));
    try {
        (void)ws.resolve_input("d/none.tif");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::MissingFile);
    }
    CHECK_THROWS_AS(ws.resolve_directory("nope"), Error);
}

TEST_CASE("pixelwise arithmetic") {
    const Raster a = testutil::row_raster({4, 6});
    const Raster b = testutil::row_raster({1, 2});
    const Raster d = pixelwise(a, b, BinaryOp::Sub);
    CHECK(d.data()[0] == 3);
    CHECK(d.data()[1] == 4);

    const Raster z = pixelwise(a, testutil::row_raster({2, 0}), BinaryOp::Div);
    CHECK(z.data()[0] == 2);
    CHECK(std::isnan(z.data()[1]));
    CHECK_FALSE(z.is_valid(z.data()[1]));

    const Raster ad = pixelwise(testutil::row_raster({1, 5}), testutil::row_raster({3, 2}), BinaryOp::AbsDiff);
    CHECK(ad.data()[0] == 2);
    CHECK(ad.data()[1] == 3);

    try {
        (void)pixelwise(a, testutil::row_raster({1, 2, 3}), BinaryOp::Add);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ShapeMismatch);
    }
}

TEST_CASE("pixelwise propagates nodata and keeps the first GeoRef") {
    Raster a = testutil::row_raster({1, -9999, 3});
    a.set_nodata(-9999.0);
    a.set_geo(testutil::sample_georef());
    const Raster b = testutil::row_raster({1, 1, 1});
    const Raster s = pixelwise(a, b, BinaryOp::Add);
    CHECK(s.data()[0] == 2);
    CHECK(std::isnan(s.data()[1]));
    CHECK(s.geo() == a.geo());
}

TEST_CASE("statistics with nodata equal statistics over the dense valid vector") {
    std::mt19937_64 rng(3);
    Raster r(16, 16, 1, DataType::F32);
    for (double& v : r.data()) v = (rng() % 5 == 0) ? -1.0 : double(float(testutil::uniform(rng, 0, 10)));
    r.set_nodata(-1.0);
    const auto dense = r.valid_values(0);
    const auto masked = r.masked_band(0);
    const auto s = simd::summarize(masked);
    double sum = 0;
    for (double v : dense) sum += v;
    CHECK(s.count == dense.size());
    CHECK(s.sum == doctest::Approx(sum).epsilon(1e-12));
}
