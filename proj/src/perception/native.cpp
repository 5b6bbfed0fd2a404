// SPDX-License-Identifier: Apache-2.0
#include "geoagent/perception/native.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geoagent/error.hpp"

namespace geoagent::perception {

namespace {

void require_single_band(const Raster& r) {
    if (r.bands() != 1)
        throw Error(Errc::MultiBandInput,
                    "expected a single-band image, got " + std::to_string(r.bands()) + " bands");
}

} // namespace

Raster threshold_segmentation(const Raster& r, double threshold) {
    require_single_band(r);
    std::vector<double> out(r.pixels(), 0.0);
    const auto src = r.band(0);
    for (std::size_t i = 0; i < out.size(); ++i)
        if (r.is_valid(src[i]) && src[i] > threshold) out[i] = 255.0;
    return raster::make_mask_like(r, std::move(out));
}

std::size_t count_above_threshold(const Raster& r, double threshold) {
    require_single_band(r);
    std::size_t n = 0;
    for (double v : r.band(0)) n += r.is_valid(v) && v > threshold;
    return n;
}

std::vector<std::uint8_t> erode3x3(std::span<const std::uint8_t> img, std::size_t w,
                                   std::size_t h) {
    std::vector<std::uint8_t> out(img.size(), 0);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
            if (!img[y * w + x]) continue;
            bool keep = true;
            for (int dy = -1; dy <= 1 && keep; ++dy)
                for (int dx = -1; dx <= 1 && keep; ++dx) {
                    const long yy = long(y) + dy, xx = long(x) + dx;
                    if (yy < 0 || xx < 0 || yy >= long(h) || xx >= long(w)) continue;
                    keep = img[std::size_t(yy) * w + std::size_t(xx)] != 0;
                }
            out[y * w + x] = keep;
        }
    return out;
}

void zhang_suen_thin(std::vector<std::uint8_t>& img, std::size_t w, std::size_t h) {
    auto at = [&](long y, long x) -> int {
        if (y < 0 || x < 0 || y >= long(h) || x >= long(w)) return 0;
        return img[std::size_t(y) * w + std::size_t(x)] != 0;
    };
    std::vector<std::size_t> del;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int step = 0; step < 2; ++step) {
            del.clear();
            for (long y = 0; y < long(h); ++y)
                for (long x = 0; x < long(w); ++x) {
                    if (!at(y, x)) continue;
                    // P2..P9 clockwise from north.
                    const int p[8] = {at(y - 1, x), at(y - 1, x + 1), at(y, x + 1),
                                      at(y + 1, x + 1), at(y + 1, x), at(y + 1, x - 1),
                                      at(y, x - 1), at(y - 1, x - 1)};
                    int b = 0, a = 0;
                    for (int k = 0; k < 8; ++k) {
                        b += p[k];
                        a += p[k] == 0 && p[(k + 1) % 8] == 1;
                    }
                    if (b < 2 || b > 6 || a != 1) continue;
                    const bool ok = step == 0
                                        ? (p[0] * p[2] * p[4] == 0 && p[2] * p[4] * p[6] == 0)
                                        : (p[0] * p[2] * p[6] == 0 && p[0] * p[4] * p[6] == 0);
                    if (ok) del.push_back(std::size_t(y) * w + std::size_t(x));
                }
            for (std::size_t i : del) img[i] = 0;
            changed = changed || !del.empty();
        }
    }
}

std::size_t count_components8(std::span<const std::uint8_t> img, std::size_t w, std::size_t h) {
    std::vector<std::uint8_t> seen(img.size(), 0);
    std::vector<std::size_t> stack;
    std::size_t n = 0;
    for (std::size_t start = 0; start < img.size(); ++start) {
        if (!img[start] || seen[start]) continue;
        ++n;
        seen[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            const long y = long(i / w), x = long(i % w);
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const long yy = y + dy, xx = x + dx;
                    if (yy < 0 || xx < 0 || yy >= long(h) || xx >= long(w)) continue;
                    const std::size_t j = std::size_t(yy) * w + std::size_t(xx);
                    if (img[j] && !seen[j]) {
                        seen[j] = 1;
                        stack.push_back(j);
                    }
                }
        }
    }
    return n;
}

std::size_t count_skeleton_contours(const Raster& binary) {
    require_single_band(binary);
    const std::size_t w = binary.width(), h = binary.height();
    std::vector<std::uint8_t> img(binary.pixels());
    const auto src = binary.band(0);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = src[i];
        if (!binary.is_valid(v)) continue;
        if (v != 0.0 && v != 1.0 && v != 255.0)
            throw Error(Errc::NonBinaryInput, "pixel value " + std::to_string(v) +
                                                  " in a binary image (expected 0, 1 or 255)");
        img[i] = v != 0.0;
    }
    auto eroded = erode3x3(img, w, h);
    zhang_suen_thin(eroded, w, h);
    return count_components8(eroded, w, h);
}

std::vector<BBox> expand_bboxes(std::span<const BBox> boxes, double radius, double width,
                                double height) {
    if (radius < 0) throw Error(Errc::InvalidArgument, "radius must be non-negative");
    std::vector<BBox> out;
    out.reserve(boxes.size());
    for (const BBox& b : boxes) {
        if (b.x_min > b.x_max || b.y_min > b.y_max)
            throw Error(Errc::InvalidArgument, "box corners are out of order");
        out.push_back({std::max(0.0, b.x_min - radius), std::max(0.0, b.y_min - radius),
                       std::min(width, b.x_max + radius), std::min(height, b.y_max + radius)});
    }
    return out;
}

std::vector<Point> bbox_centroids(std::span<const BBox> boxes) {
    std::vector<Point> out;
    out.reserve(boxes.size());
    for (const BBox& b : boxes) out.push_back({(b.x_min + b.x_max) / 2, (b.y_min + b.y_max) / 2});
    return out;
}

DistanceExtremes centroid_distance_extremes(std::span<const Point> pts) {
    if (pts.size() < 2) throw Error(Errc::EmptyList, "need at least two points");
    DistanceExtremes e;
    e.closest.distance = std::numeric_limits<double>::infinity();
    e.farthest.distance = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double d = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
            if (d < e.closest.distance) e.closest = {i, j, d};
            if (d > e.farthest.distance) e.farthest = {i, j, d};
        }
    return e;
}

double total_bbox_area(std::span<const std::array<double, 4>> xywh) {
    double s = 0.0;
    for (const auto& b : xywh) {
        if (b[2] < 0 || b[3] < 0) throw Error(Errc::InvalidArgument, "negative box size");
        s += b[2] * b[3];
    }
    return s;
}

} // namespace geoagent::perception
