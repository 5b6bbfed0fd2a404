// SPDX-License-Identifier: Apache-2.0
#include "geoagent/perception/expert.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "geoagent/error.hpp"
#include "geoagent/net/http.hpp"

namespace geoagent::perception {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view model_name(ExpertModel m) noexcept {
    switch (m) {
    case ExpertModel::MSCN: return "MSCN";
    case ExpertModel::RemoteCLIP: return "RemoteCLIP";
    case ExpertModel::SM3Det: return "SM3Det";
    case ExpertModel::StripRCNN: return "Strip_R_CNN";
    case ExpertModel::RemoteSAM: return "RemoteSAM";
    case ExpertModel::InstructSAM: return "InstructSAM";
    case ExpertModel::SAM2: return "SAM2";
    case ExpertModel::ChangeOS: return "ChangeOS";
    }
    return "?";
}

namespace {

std::string squash(std::string_view s) {
    std::string out;
    for (char c : s)
        if (c != '_' && c != '-' && c != ' ') out.push_back(char(std::tolower((unsigned char)c)));
    return out;
}

std::string normalize_prompt(std::string_view s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (std::isspace((unsigned char)c)) {
            space = !out.empty();
            continue;
        }
        if (space) out.push_back(' ');
        space = false;
        out.push_back(char(std::tolower((unsigned char)c)));
    }
    return out;
}

} // namespace

ExpertModel parse_model(std::string_view s) {
    const std::string key = squash(s);
    for (ExpertModel m : kAllModels)
        if (squash(model_name(m)) == key) return m;
    throw Error(Errc::InvalidArgument, "unknown expert model '" + std::string(s) + "'");
}

std::string_view task_name(Task t) noexcept {
    switch (t) {
    case Task::Classify: return "classify";
    case Task::Detect: return "detect";
    case Task::Ground: return "ground";
    case Task::Count: return "count";
    case Task::Segment: return "segment";
    case Task::Change: return "change";
    }
    return "?";
}

Task parse_task(std::string_view s) {
    for (Task t : {Task::Classify, Task::Detect, Task::Ground, Task::Count, Task::Segment,
                   Task::Change})
        if (task_name(t) == s) return t;
    throw Error(Errc::InvalidArgument, "unknown perception task '" + std::string(s) + "'");
}

std::span<const Task> supported_tasks(ExpertModel m) noexcept {
    static constexpr Task classify[] = {Task::Classify};
    static constexpr Task detect[] = {Task::Detect};
    static constexpr Task ground[] = {Task::Ground};
    static constexpr Task count[] = {Task::Count};
    static constexpr Task segment[] = {Task::Segment};
    static constexpr Task change[] = {Task::Change, Task::Segment};
    switch (m) {
    case ExpertModel::MSCN:
    case ExpertModel::RemoteCLIP: return classify;
    case ExpertModel::SM3Det:
    case ExpertModel::StripRCNN: return detect;
    case ExpertModel::RemoteSAM: return ground;
    case ExpertModel::InstructSAM: return count;
    case ExpertModel::SAM2: return segment;
    case ExpertModel::ChangeOS: return change;
    }
    return {};
}

bool supports(ExpertModel m, Task t) noexcept {
    const auto ts = supported_tasks(m);
    return std::find(ts.begin(), ts.end(), t) != ts.end();
}

std::span<const std::string_view> label_vocabulary(ExpertModel m) noexcept {
    static constexpr std::string_view mscn[] = {
        "Airport",          "BareLand",       "BaseballField", "Beach",
        "Bridge",           "Center",         "Church",        "Commercial",
        "DenseResidential", "Desert",         "Farmland",      "Forest",
        "Industrial",       "Meadow",         "MediumResidential", "Mountain",
        "Park",             "Parking",        "Playground",    "Pond",
        "Port",             "RailwayStation", "Resort",        "River",
        "School",           "SparseResidential", "Square",     "Stadium",
        "StorageTanks",     "Viaduct"};
    static constexpr std::string_view clip[] = {
        "Airport", "Beach",   "Bridge", "Commercial", "Desert",         "Farmland",
        "FootballField", "Forest", "Industrial", "Meadow", "Mountain",  "Park",
        "Parking", "Pond",    "Port",   "RailwayStation", "Residential", "River", "Viaduct"};
    static constexpr std::string_view sm3det[] = {
        "plane",          "ship",          "storage tank",  "baseball diamond",
        "tennis court",   "basketball court", "ground track field", "harbor",
        "bridge",         "large vehicle", "small vehicle", "helicopter",
        "roundabout",     "soccer ball field", "swimming pool"};
    static constexpr std::string_view strip[] = {
        "L3 ship",     "L3 warcraft", "L3 merchant ship", "L3 aircraft carrier",
        "Arleigh Burke", "Container", "Ticonderoga",      "Perry",
        "Tarawa",      "WhidbeyIsland", "CommanderA",     "Austen",
        "Nimitz",      "Sanantonio",  "Car carrierB",     "Enterprise",
        "Car carrierA", "Medical"};
    switch (m) {
    case ExpertModel::MSCN: return mscn;
    case ExpertModel::RemoteCLIP: return clip;
    case ExpertModel::SM3Det: return sm3det;
    case ExpertModel::StripRCNN: return strip;
    default: return {};
    }
}

json ExpertResult::to_json() const {
    json j = {{"task", task_name(task)}};
    switch (task) {
    case Task::Classify: j["label"] = label; break;
    case Task::Detect:
    case Task::Ground: {
        json arr = json::array();
        for (const BBox& b : boxes) arr.push_back({b.x_min, b.y_min, b.x_max, b.y_max});
        j["boxes"] = arr;
        break;
    }
    case Task::Count: j["count"] = count; break;
    case Task::Segment:
    case Task::Change: j["mask"] = mask.string(); break;
    }
    return j;
}

void validate_request(const ExpertRequest& req) {
    if (!supports(req.model, req.task))
        throw Error(Errc::UnsupportedTask, std::string(model_name(req.model)) + " does not support " +
                                               std::string(task_name(req.task)));
    const std::size_t need = req.task == Task::Change ? 2 : 1;
    if (req.images.size() != need)
        throw Error(Errc::InvalidArgument, std::string(task_name(req.task)) + " takes " +
                                               std::to_string(need) + " image(s), got " +
                                               std::to_string(req.images.size()));
    if ((req.task == Task::Segment || req.task == Task::Change) && !req.output_path)
        throw Error(Errc::InvalidArgument, "mask tasks need an output path");
    if ((req.task == Task::Detect || req.task == Task::Ground || req.task == Task::Count) &&
        (!req.prompt || req.prompt->empty()))
        throw Error(Errc::InvalidArgument,
                    std::string(task_name(req.task)) + " needs a text prompt");
}

namespace {

std::vector<BBox> parse_boxes(const json& j) {
    if (!j.is_array()) throw Error(Errc::SchemaError, "boxes must be an array");
    std::vector<BBox> out;
    for (const auto& b : j) {
        if (!b.is_array() || b.size() != 4) throw Error(Errc::SchemaError, "box must have 4 numbers");
        out.push_back({b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                       b[3].get<double>()});
    }
    return out;
}

// Shared decoding of a backend's typed answer. Mask sources are copied into
// the workspace at the requested output path.
ExpertResult decode(const raster::Workspace& ws, const ExpertRequest& req, const json& value,
                    const char* mask_key) {
    ExpertResult r;
    r.task = req.task;
    try {
        switch (req.task) {
        case Task::Classify:
            r.label = value.is_object() ? value.at("label").get<std::string>()
                                        : value.get<std::string>();
            break;
        case Task::Detect:
        case Task::Ground:
            r.boxes = parse_boxes(value.is_object() ? value.at("boxes") : value);
            break;
        case Task::Count:
            r.count = value.is_object() ? value.at("count").get<std::size_t>()
                                        : value.get<std::size_t>();
            break;
        case Task::Segment:
        case Task::Change: {
            const auto src = value.at(mask_key).get<std::string>();
            r.mask = ws.write(ws.load(src), *req.output_path);
            break;
        }
        }
    } catch (const json::exception& e) {
        throw Error(Errc::SchemaError, std::string("malformed expert result: ") + e.what());
    }
    return r;
}

} // namespace

MockBackend::MockBackend(raster::Workspace ws, json manifest)
    : ws_(std::move(ws)), entries_(std::move(manifest)) {
    if (entries_.is_object() && entries_.contains("entries")) entries_ = entries_["entries"];
    if (!entries_.is_array()) throw Error(Errc::SchemaError, "mock manifest must list entries");
}

MockBackend MockBackend::from_file(raster::Workspace ws, const fs::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw Error(Errc::MissingFile, "mock manifest not found: " + manifest.string());
    try {
        return MockBackend(std::move(ws), json::parse(in));
    } catch (const json::exception& e) {
        throw Error(Errc::CorruptFile, "mock manifest is not JSON: " + std::string(e.what()));
    }
}

ExpertResult MockBackend::call(const ExpertRequest& req) const {
    validate_request(req);
    for (const auto& img : req.images) (void)ws_.resolve_input(img);
    const std::string stem = fs::path(req.images.front()).stem().string();
    const std::string prompt = req.prompt ? normalize_prompt(*req.prompt) : "";
    for (const auto& e : entries_) {
        if (e.value("image", "") != stem || e.value("task", "") != task_name(req.task)) continue;
        if (e.contains("model") && parse_model(e["model"].get<std::string>()) != req.model) continue;
        const std::string want = e.contains("prompt") && e["prompt"].is_string()
                                     ? normalize_prompt(e["prompt"].get<std::string>())
                                     : "";
        if (want != "*" && want != prompt) continue;
        return decode(ws_, req, e.at("result"), "mask");
    }
    throw Error(Errc::InvalidArgument, "no " + std::string(model_name(req.model)) + " result for image '" +
                                           stem + "'" + (prompt.empty() ? "" : " and prompt '" + prompt + "'"));
}

HttpBackend::HttpBackend(raster::Workspace ws, std::string base_url,
                         std::chrono::milliseconds timeout)
    : ws_(std::move(ws)), base_url_(std::move(base_url)), timeout_(timeout) {}

ExpertResult HttpBackend::call(const ExpertRequest& req) const {
    validate_request(req);
    json images = json::array();
    for (const auto& img : req.images) images.push_back(ws_.resolve_input(img).string());
    const json body = {{"task", task_name(req.task)},
                       {"model", model_name(req.model)},
                       {"images", images},
                       {"prompt", req.prompt ? json(*req.prompt) : json(nullptr)}};
    const json reply = net::post_json(base_url_, "/infer", body, {timeout_, {}});
    return decode(ws_, req, reply, "mask_path");
}

} // namespace geoagent::perception
