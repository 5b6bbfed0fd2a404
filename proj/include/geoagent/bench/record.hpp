// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "geoagent/agent/episode.hpp"

namespace geoagent::bench {

using tools::json;

/// A trajectory as written to disk.
///
///   {"task_id",
///    "steps": [{"tool", "input", "output": ToolResult}],
///    "final": {"answer": {"text", "value"} | null, "stop_reason", "policy_error"},
///    "metadata": {"model", "regime", "query", "data_dir", "started_at",
///                 "finished_at", "wall_seconds",
///                 "usage": {"prompt_tokens", "completion_tokens", "requests"}}}
struct TrajectoryRecord {
    std::string task_id;
    std::string model;
    std::string started_at;   ///< UTC, ISO 8601
    std::string finished_at;
    agent::Trajectory trajectory;

    json to_json() const;
    /// Validates the document. Throws Error{SchemaError} naming the field.
    static TrajectoryRecord from_json(const json& j);

    friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

/// Throws Error{SchemaError} if `j` is not a valid record.
void validate_record(const json& j);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_now();

} // namespace geoagent::bench
