// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <thread>

#include "doctest.h"
#include "geoagent/error.hpp"
#include "geoagent/perception/expert.hpp"
#include "geoagent/perception/native.hpp"
#include "geoagent/raster/io.hpp"
#include "httplib.h"
#include "test_util.hpp"

using namespace geoagent;
using namespace geoagent::perception;
using raster::DataType;
using raster::Raster;
using testutil::TempDir;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

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

Raster binary(std::size_t w, std::size_t h, const std::vector<std::array<std::size_t, 4>>& rects,
              double on = 1.0) {
    Raster r(w, h, 1, DataType::U8);
    for (const auto& [x0, y0, x1, y1] : rects)
        for (std::size_t y = y0; y < y1; ++y)
            for (std::size_t x = x0; x < x1; ++x) r.at(0, y, x) = on;
    return r;
}

} // namespace

// ---- native tools --------------------------------------------------------

TEST_CASE("threshold segmentation uses a strict greater-than") {
    const Raster s = threshold_segmentation(testutil::row_raster({1, 5, 9}), 5);
    CHECK(std::vector<double>(s.data().begin(), s.data().end()) == std::vector<double>{0, 0, 255});
    CHECK(s.dtype() == DataType::U8);
    const Raster none = threshold_segmentation(testutil::row_raster({1, 5, 9}), 9);
    for (double v : none.data()) CHECK(v == 0);

    std::mt19937_64 rng(3);
    std::vector<double> v(64);
    for (double& x : v) x = testutil::uniform(rng, -10, 10);
    const Raster once = threshold_segmentation(testutil::f32_raster(8, 8, v), 0.5);
    for (double x : once.data()) CHECK((x == 0 || x == 255));
    CHECK(threshold_segmentation(once, 127) == once);

    CHECK(code_of([] { (void)threshold_segmentation(Raster(1, 1, 2, DataType::U8), 0); }) ==
          Errc::MultiBandInput);
}

TEST_CASE("count above threshold") {
    CHECK(count_above_threshold(testutil::row_raster({1, 5, 9}), 5) == 1);
    CHECK(count_above_threshold(testutil::row_raster({1, 5, 9}), 0) == 3);
    std::mt19937_64 rng(4);
    std::vector<double> v(100);
    for (double& x : v) x = double(rng() % 10);
    const Raster r = testutil::f32_raster(10, 10, v);
    const Raster m = threshold_segmentation(r, 6);
    double sum = 0;
    for (double x : m.data()) sum += x / 255;
    CHECK(count_above_threshold(r, 6) == std::size_t(sum));
}

TEST_CASE("skeleton contour count") {
    CHECK(count_skeleton_contours(binary(20, 12, {{2, 2, 7, 7}, {11, 4, 16, 9}})) == 2);
    CHECK(count_skeleton_contours(binary(20, 12, {{2, 2, 7, 7}, {11, 4, 16, 9}}, 255)) == 2);
    CHECK(count_skeleton_contours(binary(10, 10, {})) == 0);
    // A long bar survives erosion and thins to one line.
    CHECK(count_skeleton_contours(binary(30, 10, {{2, 3, 27, 7}})) == 1);
    // One-pixel lines vanish under the erosion pass.
    CHECK(count_skeleton_contours(binary(10, 10, {{1, 5, 9, 6}})) == 0);

    for (std::size_t dx : {0u, 3u, 7u})
        for (std::size_t dy : {0u, 2u})
            CHECK(count_skeleton_contours(binary(30, 20, {{2 + dx, 2 + dy, 7 + dx, 7 + dy},
                                                          {10 + dx, 9 + dy, 20 + dx, 14 + dy},
                                                          {3 + dx, 11 + dy, 8 + dx, 16 + dy}})) == 3);

    CHECK(code_of([] { (void)count_skeleton_contours(testutil::row_raster({0, 2})); }) ==
          Errc::NonBinaryInput);
}

TEST_CASE("component count matches a union-find oracle") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 20; ++t) {
        const std::size_t w = 17, h = 13;
        std::vector<std::uint8_t> img(w * h);
        for (auto& v : img) v = rng() % 3 == 0;
        std::vector<std::size_t> parent(img.size());
        for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
        auto find = [&](std::size_t i) {
            while (parent[i] != i) i = parent[i] = parent[parent[i]];
            return i;
        };
        for (std::size_t i = 0; i < img.size(); ++i)
            for (std::size_t j = i + 1; j < img.size(); ++j) {
                if (!img[i] || !img[j]) continue;
                const long dy = long(i / w) - long(j / w), dx = long(i % w) - long(j % w);
                if (std::abs(dy) <= 1 && std::abs(dx) <= 1) parent[find(i)] = find(j);
            }
        std::size_t roots = 0;
        for (std::size_t i = 0; i < img.size(); ++i) roots += img[i] && find(i) == i;
        CHECK(count_components8(img, w, h) == roots);
    }
}

TEST_CASE("thinning leaves a connected one-pixel skeleton") {
    std::vector<std::uint8_t> img(20 * 9, 0);
    for (std::size_t y = 2; y < 7; ++y)
        for (std::size_t x = 2; x < 18; ++x) img[y * 20 + x] = 1;
    zhang_suen_thin(img, 20, 9);
    CHECK(count_components8(img, 20, 9) == 1);
    for (std::size_t x = 0; x < 20; ++x) {
        int col = 0;
        for (std::size_t y = 0; y < 9; ++y) col += img[y * 20 + x];
        CHECK(col <= 1);
    }
}

TEST_CASE("bbox operations") {
    const std::vector<BBox> boxes = {{10, 10, 20, 20}};
    CHECK(expand_bboxes(boxes, 5, 100, 100).front() == BBox{5, 5, 25, 25});
    CHECK(expand_bboxes(boxes, 0, 100, 100) == boxes);
    CHECK(expand_bboxes(boxes, 50, 100, 90).front() == BBox{0, 0, 70, 70});
    const auto small = expand_bboxes(boxes, 2, 100, 100).front();
    const auto big = expand_bboxes(boxes, 7, 100, 100).front();
    CHECK(big.x_min <= small.x_min);
    CHECK(big.x_max >= small.x_max);

    const std::vector<BBox> one = {{0, 0, 10, 10}};
    CHECK(bbox_centroids(one).front() == Point{5, 5});

    const std::array<double, 4> xywh[] = {{0, 0, 2, 3}, {5, 5, 4, 1}};
    CHECK(total_bbox_area(xywh) == 10.0);
}

TEST_CASE("distance extremes match the all-pairs oracle") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 20; ++t) {
        std::vector<Point> pts(3 + rng() % 8);
        for (auto& p : pts) p = {testutil::uniform(rng, 0, 100), testutil::uniform(rng, 0, 100)};
        double lo = 1e300, hi = -1;
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = 0; j < pts.size(); ++j) {
                if (i == j) continue;
                const double d = std::sqrt((pts[i].x - pts[j].x) * (pts[i].x - pts[j].x) +
                                           (pts[i].y - pts[j].y) * (pts[i].y - pts[j].y));
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
        const auto e = centroid_distance_extremes(pts);
        CHECK(e.closest.distance == doctest::Approx(lo).epsilon(1e-12));
        CHECK(e.farthest.distance == doctest::Approx(hi).epsilon(1e-12));
        CHECK(e.closest.i < e.closest.j);
    }
    const std::vector<Point> single = {{0, 0}};
    CHECK(code_of([&] { (void)centroid_distance_extremes(single); }) == Errc::EmptyList);
}

// ---- expert adapters -----------------------------------------------------

namespace {

struct ExpertFixture {
    TempDir dir;
    raster::Workspace ws{dir.path()};
    ExpertFixture() {
        const Raster rgb(2, 2, 3, DataType::U8, std::vector<double>(12, 10));
        fs::create_directories(dir / "img");
        raster::write_png(rgb, dir / "img/airport_01.png");
        raster::write_png(rgb, dir / "img/harbor_03.png");
        testutil::write_raster(dir / "masks/change_a.tif",
                               Raster(2, 2, 1, DataType::U8, {0, 1, 1, 0}));
    }
    json manifest() const {
        return json::parse(R"({"entries": [
          {"image": "airport_01", "task": "classify", "result": "Airport"},
          {"image": "airport_01", "task": "detect", "prompt": "plane",
           "result": [[1, 1, 5, 5], [10, 12, 20, 22]]},
          {"image": "harbor_03", "task": "count", "prompt": "Storage  Tank", "result": 7},
          {"image": "harbor_03", "task": "change", "result": {"mask": "masks/change_a.tif"}},
          {"image": "airport_01", "task": "segment", "model": "ChangeOS",
           "result": {"mask": "masks/change_a.tif"}}
        ]})");
    }
};

} // namespace

TEST_CASE("mock backend answers from the manifest") {
    ExpertFixture f;
    const MockBackend mock(f.ws, f.manifest());
    const auto cls = mock.call({ExpertModel::MSCN, Task::Classify, {"img/airport_01.png"}, {}, {}});
    CHECK(cls.label == "Airport");
    CHECK(mock.call({ExpertModel::MSCN, Task::Classify, {"img/airport_01.png"}, {}, {}}).to_json() ==
          cls.to_json());

    const auto det = mock.call({ExpertModel::SM3Det, Task::Detect, {"img/airport_01.png"}, "plane", {}});
    REQUIRE(det.boxes.size() == 2);
    CHECK(det.boxes[1] == BBox{10, 12, 20, 22});

    const auto cnt = mock.call({ExpertModel::InstructSAM, Task::Count, {"img/harbor_03.png"},
                                "storage tank", {}});
    CHECK(cnt.count == 7);

    const auto chg = mock.call({ExpertModel::ChangeOS, Task::Change,
                                {"img/harbor_03.png", "img/harbor_03.png"}, {}, "q/change.tif"});
    CHECK(chg.mask.filename() == "change.tif");
    CHECK(raster::load_raster(chg.mask).data()[1] == 1);

    const auto seg = mock.call({ExpertModel::ChangeOS, Task::Segment, {"img/airport_01.png"}, {},
                                "q/seg.tif"});
    CHECK(fs::exists(seg.mask));
}

TEST_CASE("expert request validation") {
    ExpertFixture f;
    const MockBackend mock(f.ws, f.manifest());
    CHECK(code_of([&] {
              (void)mock.call({ExpertModel::MSCN, Task::Detect, {"img/airport_01.png"}, "plane", {}});
          }) == Errc::UnsupportedTask);
    CHECK(code_of([&] {
              (void)mock.call({ExpertModel::MSCN, Task::Classify, {"img/nowhere.png"}, {}, {}});
          }) == Errc::MissingFile);
    CHECK(code_of([&] {
              (void)mock.call({ExpertModel::SM3Det, Task::Detect, {"img/airport_01.png"}, "ship", {}});
          }) == Errc::InvalidArgument);
    CHECK(supports(ExpertModel::ChangeOS, Task::Segment));
    CHECK(supports(ExpertModel::InstructSAM, Task::Count));
    CHECK_FALSE(supports(ExpertModel::SAM2, Task::Change));
    CHECK(parse_model("Strip_R_CNN") == ExpertModel::StripRCNN);
    CHECK(parse_model("striprcnn") == ExpertModel::StripRCNN);
    CHECK(label_vocabulary(ExpertModel::MSCN).size() == 30);
}

TEST_CASE("HTTP backend posts one request per call") {
    ExpertFixture f;
    httplib::Server srv;
    json seen;
    srv.Post("/infer", [&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        if (seen["task"] == "classify") res.set_content(R"({"label": "Beach"})", "application/json");
        else res.set_content(R"({"mask_path": ")" + (f.dir / "masks/change_a.tif").string() + R"("})",
                             "application/json");
    });
    const int port = srv.bind_to_any_port("127.0.0.1");
    std::thread th([&] { srv.listen_after_bind(); });
    srv.wait_until_ready();

    const HttpBackend http(f.ws, "http://127.0.0.1:" + std::to_string(port));
    const auto r = http.call({ExpertModel::RemoteCLIP, Task::Classify, {"img/airport_01.png"}, {}, {}});
    CHECK(r.label == "Beach");
    CHECK(seen["model"] == "RemoteCLIP");
    CHECK(seen["images"].size() == 1);
    const auto m = http.call({ExpertModel::SAM2, Task::Segment, {"img/airport_01.png"}, {}, "o/m.tif"});
    CHECK(fs::exists(m.mask));
    srv.stop();
    th.join();

    const HttpBackend dead(f.ws, "http://127.0.0.1:" + std::to_string(port),
                           std::chrono::milliseconds(300));
    CHECK(code_of([&] {
              (void)dead.call({ExpertModel::MSCN, Task::Classify, {"img/airport_01.png"}, {}, {}});
          }) == Errc::EndpointUnreachable);
}
