// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoagent/agent/policy.hpp"
#include "geoagent/eval/metrics.hpp"

namespace geoagent::bench {

using tools::json;
namespace fs = std::filesystem;

enum class Modality { Spectrum, Products, RGB };

std::string_view modality_name(Modality m) noexcept;
std::optional<Modality> parse_modality(std::string_view s) noexcept;

/// {"steps": [{"tool", "input", "output"}], "answer": value}
json ground_truth_to_json(const eval::GroundTruth& gt);
/// Reads the steps and answer; the rule is left at its default. Throws
/// Error{SchemaError}.
eval::GroundTruth ground_truth_from_json(const json& j);

/// One benchmark task.
///
/// File layout (repo-defined field names):
///   {"id", "modality": "Spectrum"|"Products"|"RGB", "query_ap", "query_if",
///    "data_dir", "answer_rule", "ground_truth": {"steps", "answer"}}
/// `data_dir` is relative to the task file unless absolute.
struct TaskSpec {
    std::string id;
    Modality modality = Modality::Spectrum;
    std::string query_ap;
    std::string query_if;
    std::string data_dir;
    eval::GroundTruth ground_truth;  ///< carries the answer rule

    /// Absolute data directory, filled in by load_task.
    fs::path data_root;

    const std::string& query(agent::Regime r) const {
        return r == agent::Regime::AutoPlanning ? query_ap : query_if;
    }

    json to_json() const;
    /// Structural checks only; throws Error{SchemaError}.
    static TaskSpec from_json(const json& j);
};

/// Parses a task file, resolves its data directory (Error{MissingDirectory}
/// when absent) and, given a registry, rejects reference steps naming
/// unregistered tools (Error{SchemaError}).
TaskSpec load_task(const fs::path& file, const tools::Registry* registry = nullptr);

/// Every *.json task under `dir`, sorted by id.
std::vector<TaskSpec> load_tasks(const fs::path& dir, const tools::Registry* registry = nullptr);

/// Annotation input: a ground-truth trajectory without outputs.
///
///   {"steps": [{"tool", "input"}], "final_answer"?: {"value": ...},
///    "answer_rule"?: rule}
/// Inputs and the answer value may use {"$from": k, "field"?} references.
/// The answer defaults to the value of the last step.
struct Plan {
    std::vector<agent::PlanStep> steps;
    json answer = {{"$from", -1}};
    eval::AnswerRule rule;

    json to_json() const;
    static Plan from_json(const json& j);
};

/// Runs the plan and records every (tool, input, output) step plus the
/// designated answer. Absolute paths under the workspace or data roots are
/// rewritten relative to them so the result does not depend on where it
/// ran. Any failing step aborts with Error{InvalidArgument} carrying the
/// step index.
eval::GroundTruth annotate_from_plan(const Plan& plan, const tools::Registry& registry,
                                     const tools::ToolContext& ctx);

/// Removes "<root>/" prefixes (for each root, as given and canonical) from
/// every string in `j`.
json relativize(const json& j, const std::vector<fs::path>& roots);

/// Reads and writes JSON files. Write is atomic (temp file + rename) and
/// ends with a newline; reads throw Error{MissingFile} / Error{SchemaError}.
json read_json_file(const fs::path& p);
void write_json_file(const fs::path& p, const json& j);

} // namespace geoagent::bench
