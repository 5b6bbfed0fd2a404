// SPDX-License-Identifier: Apache-2.0
#include "geoagent/perception/expert.hpp"
#include "geoagent/perception/native.hpp"
#include "kit_util.hpp"

namespace geoagent::tools {

using namespace kit;
namespace pc = geoagent::perception;

namespace {

std::vector<std::array<double, 4>> quads(const json& arr, std::string_view what) {
    std::vector<std::array<double, 4>> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& b = arr[i];
        if (!b.is_array() || b.size() != 4)
            throw Error(Errc::InvalidArgument,
                        std::string(what) + " element " + std::to_string(i) + " must hold 4 numbers");
        std::array<double, 4> q{};
        for (std::size_t k = 0; k < 4; ++k) {
            if (!b[k].is_number())
                throw Error(Errc::InvalidArgument,
                            std::string(what) + " element " + std::to_string(i) + " must hold 4 numbers");
            q[k] = b[k].get<double>();
        }
        out.push_back(q);
    }
    return out;
}

std::vector<pc::BBox> corner_boxes(const json& arr) {
    std::vector<pc::BBox> out;
    for (const auto& q : quads(arr, "bboxes")) out.push_back({q[0], q[1], q[2], q[3]});
    return out;
}

json boxes_json(std::span<const pc::BBox> boxes) {
    json arr = json::array();
    for (const auto& b : boxes) arr.push_back({b.x_min, b.y_min, b.x_max, b.y_max});
    return arr;
}

const pc::ExpertBackend& expert(const ToolContext& ctx) {
    if (!ctx.expert) throw Error(Errc::EndpointUnreachable, "no perception backend configured");
    return *ctx.expert;
}

ToolResult expert_result(const pc::ExpertResult& r) {
    switch (r.task) {
    case pc::Task::Classify: return ToolResult::success(r.label);
    case pc::Task::Detect:
    case pc::Task::Ground: return ToolResult::success(boxes_json(r.boxes));
    case pc::Task::Count: return ToolResult::success(r.count);
    case pc::Task::Segment:
    case pc::Task::Change: return ToolResult::saved(r.mask);
    }
    return ToolResult::success(r.to_json());
}

std::string vocabulary_note(pc::ExpertModel m) {
    const auto labels = pc::label_vocabulary(m);
    if (labels.empty()) return {};
    std::string s = " Categories: ";
    for (std::size_t i = 0; i < labels.size(); ++i) s += (i ? ", " : "") + std::string(labels[i]);
    return s + ".";
}

void add_classifier(Registry& reg, pc::ExpertModel m, std::string desc) {
    reg.add(tool(std::string(pc::model_name(m)), "Perception", desc + vocabulary_note(m),
                 {str("image_path", "Input image")}),
            [m](const Args& a, const ToolContext& ctx) {
                pc::ExpertRequest req{m, pc::Task::Classify, {a.str("image_path")}, {}, {}};
                return expert_result(expert(ctx).call(req));
            });
}

void add_prompted(Registry& reg, pc::ExpertModel m, pc::Task task, std::string desc) {
    reg.add(tool(std::string(pc::model_name(m)), "Perception", std::move(desc),
                 {str("image_path", "Input image"),
                  str("text_prompt", "Target object or region described in words")}),
            [m, task](const Args& a, const ToolContext& ctx) {
                pc::ExpertRequest req{m, task, {a.str("image_path")}, a.str("text_prompt"), {}};
                return expert_result(expert(ctx).call(req));
            });
}

} // namespace

void register_perception_tools(Registry& reg) {
    add_classifier(reg, pc::ExpertModel::MSCN, "Scene and land-use image classifier.");
    add_classifier(reg, pc::ExpertModel::RemoteCLIP, "Scene and land-use image classifier.");
    add_prompted(reg, pc::ExpertModel::StripRCNN, pc::Task::Detect,
                 "Object detector focused on maritime and ship targets; returns "
                 "[x_min, y_min, x_max, y_max] boxes.");
    add_prompted(reg, pc::ExpertModel::SM3Det, pc::Task::Detect,
                 "Object detector for a prompted category such as plane or ship; returns "
                 "[x_min, y_min, x_max, y_max] boxes.");
    add_prompted(reg, pc::ExpertModel::RemoteSAM, pc::Task::Ground,
                 "Visual grounding: boxes of the region described by the prompt.");
    add_prompted(reg, pc::ExpertModel::InstructSAM, pc::Task::Count,
                 "Counts instances of the prompted object.");

    reg.add(tool("SAM2", "Perception", "Segment the input image and save the mask.",
                 {str("image_path", "Input image"), str("output_path", "Output mask path")}),
            [](const Args& a, const ToolContext& ctx) {
                pc::ExpertRequest req{pc::ExpertModel::SAM2, pc::Task::Segment, {a.str("image_path")},
                                      {}, a.str("output_path")};
                return expert_result(expert(ctx).call(req));
            });
    reg.add(tool("ChangeOS", "Perception",
                 "Change mask between two images. Passing the same path twice segments buildings "
                 "in that image.",
                 {str("pre_image_path", "Earlier image"), str("post_image_path", "Later image"),
                  str("output_path", "Output mask path")}),
            [](const Args& a, const ToolContext& ctx) {
                const auto pre = a.str("pre_image_path"), post = a.str("post_image_path");
                pc::ExpertRequest req{pc::ExpertModel::ChangeOS, pc::Task::Change, {pre, post}, {},
                                      a.str("output_path")};
                if (pre == post) {
                    req.task = pc::Task::Segment;
                    req.images = {pre};
                }
                return expert_result(expert(ctx).call(req));
            });

    reg.add(tool("threshold_segmentation", "Perception",
                 "Binary mask of a single-band raster: 255 where value > threshold, else 0.",
                 {str("image_path", "Single-band raster"), num("threshold", "Threshold"),
                  str("output_path", "Output mask path")}),
            [](const Args& a, const ToolContext& ctx) {
                const auto r = ctx.ws().load(a.str("image_path"));
                return ToolResult::saved(
                    ctx.ws().write(pc::threshold_segmentation(r, a.num("threshold")), a.str("output_path")));
            });
    reg.add(tool("bbox_expansion", "Perception",
                 "Grow [x_min, y_min, x_max, y_max] boxes by a radius, clamped to the image.",
                 {list("bboxes", ParamType::Array, "Boxes as [x_min, y_min, x_max, y_max]"),
                  num("radius", "Pixels added on each side"),
                  str("image_path", "Image the boxes belong to")}),
            [](const Args& a, const ToolContext& ctx) {
                const auto boxes = corner_boxes(a.raw("bboxes"));
                const double radius = a.num("radius");
                if (radius < 0) throw Error(Errc::InvalidArgument, "radius must be non-negative");
                const auto r = ctx.ws().load(a.str("image_path"));
                return ToolResult::success(boxes_json(
                    pc::expand_bboxes(boxes, radius, double(r.width()), double(r.height()))));
            });
    reg.add(tool("count_above_threshold", "Perception",
                 "Number of pixels whose value is greater than the threshold.",
                 {str("image_path", "Input raster"), num("threshold", "Threshold")}),
            [](const Args& a, const ToolContext& ctx) {
                return ToolResult::success(
                    pc::count_above_threshold(ctx.ws().load(a.str("image_path")), a.num("threshold")));
            });
    reg.add(tool("count_skeleton_contours", "Perception",
                 "Erode and skeletonize a binary image, then count the resulting contours.",
                 {str("image_path", "Binary raster")}),
            [](const Args& a, const ToolContext& ctx) {
                return ToolResult::success(
                    pc::count_skeleton_contours(ctx.ws().load(a.str("image_path"))));
            });
    reg.add(tool("bboxes2centroids", "Perception",
                 "Centroids (x, y) of [x_min, y_min, x_max, y_max] boxes.",
                 {list("bboxes", ParamType::Array, "Boxes as [x_min, y_min, x_max, y_max]")}),
            [](const Args& a, const ToolContext&) {
                json out = json::array();
                for (const auto& p : pc::bbox_centroids(corner_boxes(a.raw("bboxes"))))
                    out.push_back({p.x, p.y});
                return ToolResult::success(std::move(out));
            });
    reg.add(tool("centroid_distance_extremes", "Perception",
                 "Closest and farthest centroid pairs with their indices and distances.",
                 {list("centroids", ParamType::Array, "Points as [x, y]")}),
            [](const Args& a, const ToolContext&) {
                const json& arr = a.raw("centroids");
                std::vector<pc::Point> pts;
                for (std::size_t i = 0; i < arr.size(); ++i) {
                    const json& p = arr[i];
                    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                        throw Error(Errc::InvalidArgument,
                                    "centroids element " + std::to_string(i) + " must be [x, y]");
                    pts.push_back({p[0].get<double>(), p[1].get<double>()});
                }
                const auto ex = pc::centroid_distance_extremes(pts);
                auto pair = [](const pc::PointPair& p) {
                    return json{{"indices", {p.i, p.j}}, {"distance", p.distance}};
                };
                return ToolResult::success({{"closest", pair(ex.closest)}, {"farthest", pair(ex.farthest)}});
            });
    reg.add(tool("calculate_bbox_area", "Perception",
                 "Total area of [x, y, w, h] boxes.",
                 {list("bboxes", ParamType::Array, "Boxes as [x, y, w, h]")}),
            [](const Args& a, const ToolContext&) {
                return ToolResult::success(pc::total_bbox_area(quads(a.raw("bboxes"), "bboxes")));
            });
}

} // namespace geoagent::tools
