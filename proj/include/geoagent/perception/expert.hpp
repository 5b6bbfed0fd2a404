// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geoagent/perception/native.hpp"
#include "geoagent/raster/workspace.hpp"
#include "json.hpp"

namespace geoagent::perception {

enum class ExpertModel { MSCN, RemoteCLIP, SM3Det, StripRCNN, RemoteSAM, InstructSAM, SAM2, ChangeOS };
enum class Task { Classify, Detect, Ground, Count, Segment, Change };

inline constexpr ExpertModel kAllModels[] = {
    ExpertModel::MSCN,      ExpertModel::RemoteCLIP,  ExpertModel::SM3Det, ExpertModel::StripRCNN,
    ExpertModel::RemoteSAM, ExpertModel::InstructSAM, ExpertModel::SAM2,   ExpertModel::ChangeOS};

/// Tool-facing name, e.g. "Strip_R_CNN".
std::string_view model_name(ExpertModel m) noexcept;
/// Accepts the tool name or the bare identifier. Throws Error{InvalidArgument}.
ExpertModel parse_model(std::string_view s);
std::string_view task_name(Task t) noexcept;
Task parse_task(std::string_view s);

bool supports(ExpertModel m, Task t) noexcept;
/// Tasks the model serves; the first is its default.
std::span<const Task> supported_tasks(ExpertModel m) noexcept;
/// Categories the model is documented to recognize (empty for open
/// vocabulary models).
std::span<const std::string_view> label_vocabulary(ExpertModel m) noexcept;

struct ExpertRequest {
    ExpertModel model = ExpertModel::MSCN;
    Task task = Task::Classify;
    std::vector<std::string> images;  ///< workspace-relative or absolute
    std::optional<std::string> prompt;
    std::optional<std::string> output_path;  ///< required for mask tasks
};

struct ExpertResult {
    Task task = Task::Classify;
    std::string label;
    std::vector<BBox> boxes;
    std::size_t count = 0;
    std::filesystem::path mask;

    nlohmann::json to_json() const;
};

class ExpertBackend {
public:
    virtual ~ExpertBackend() = default;
    /// Throws Error{UnsupportedTask}, Error{MissingFile} for absent images,
    /// Error{EndpointUnreachable} for transport failures.
    virtual ExpertResult call(const ExpertRequest& req) const = 0;
};

/// Answers from a manifest keyed by (image stem, task, prompt).
///
/// Manifest format: {"entries": [{"image": "airport_01", "task": "classify",
/// "prompt": null, "model": optional, "result": ...}]}. Result shapes per
/// task: classify a string, detect/ground a list of
/// [x0, y0, x1, y1], count an integer, segment/change {"mask": path}, where
/// the mask path is resolved like any input and copied to the output.
class MockBackend final : public ExpertBackend {
public:
    MockBackend(raster::Workspace ws, nlohmann::json manifest);
    static MockBackend from_file(raster::Workspace ws, const std::filesystem::path& manifest);

    ExpertResult call(const ExpertRequest& req) const override;

private:
    raster::Workspace ws_;
    nlohmann::json entries_;
};

/// Single POST {base_url}/infer with {task, model, images, prompt}. Reply
/// shapes mirror the mock results: {"label"}, {"boxes"}, {"count"} or
/// {"mask_path"}.
class HttpBackend final : public ExpertBackend {
public:
    HttpBackend(raster::Workspace ws, std::string base_url,
                std::chrono::milliseconds timeout = std::chrono::seconds(120));

    ExpertResult call(const ExpertRequest& req) const override;

private:
    raster::Workspace ws_;
    std::string base_url_;
    std::chrono::milliseconds timeout_;
};

/// Checks the model/task pair and image count shared by every backend.
void validate_request(const ExpertRequest& req);

} // namespace geoagent::perception
