// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "geoagent/bench/record.hpp"
#include "geoagent/bench/task.hpp"
#include "geoagent/eval/report.hpp"
#include "geoagent/perception/expert.hpp"

namespace geoagent::bench {

/// Workspace, expert backend and tool context for one task run. The mock
/// expert backend is used when the data directory holds
/// expert_manifest.json.
class TaskEnv {
public:
    TaskEnv(const fs::path& out_root, const fs::path& data_root);
    TaskEnv(const TaskEnv&) = delete;
    TaskEnv& operator=(const TaskEnv&) = delete;

    const raster::Workspace& workspace() const noexcept { return ws_; }
    const tools::ToolContext& context() const noexcept { return ctx_; }
    /// Roots stripped before parameter comparison.
    std::vector<std::string> roots() const;

private:
    raster::Workspace ws_;
    std::unique_ptr<perception::ExpertBackend> expert_;
    tools::ToolContext ctx_;
};

inline constexpr const char* kExpertManifest = "expert_manifest.json";

using PolicyFactory =
    std::function<std::unique_ptr<agent::Policy>(const TaskSpec&, agent::Regime)>;

/// Replays each task's reference steps and answer.
PolicyFactory replay_factory();
/// The same plan document for every task.
PolicyFactory script_factory(json plan);
/// One chat-completions policy per episode.
PolicyFactory llm_factory(const tools::Registry& registry, agent::LlmConfig config);

struct RunOptions {
    std::vector<agent::Regime> regimes{agent::Regime::AutoPlanning};
    agent::EpisodeConfig episode;
    std::string model = "scripted";
    fs::path runs_dir;            ///< per-task workspaces and records
    std::size_t parallelism = 1;  ///< concurrent episodes
};

struct TaskOutcome {
    std::string task_id;
    agent::Regime regime = agent::Regime::AutoPlanning;
    TrajectoryRecord record;
    eval::TaskReport report;
    std::string error;  ///< set when the task could not run at all
    fs::path record_path;
};

/// One episode in a fresh workspace under runs_dir/<task>/<regime>/, its
/// record written next to it, scored against the reference. Failures are
/// reported in the outcome, never thrown.
TaskOutcome run_task(const TaskSpec& task, agent::Regime regime, const tools::Registry& registry,
                     const PolicyFactory& factory, const RunOptions& opts);

struct BenchReport {
    std::vector<TaskOutcome> outcomes;  ///< task order, then regime order
    eval::MetricsTable by_regime;
    eval::MetricsTable by_regime_modality;

    /// Per-task reports and both tables; no timings, so equal runs give
    /// equal documents.
    json to_json() const;
    std::string to_text() const;
};

/// Runs every task under every regime on `parallelism` workers and writes
/// report.json and report.txt into runs_dir. Throws Error{EmptyInput} for an
/// empty task list.
BenchReport run_benchmark(const std::vector<TaskSpec>& tasks, const tools::Registry& registry,
                          const PolicyFactory& factory, const RunOptions& opts);

/// Writes the shipped fixture suite (data/, plans/, tasks/) under `dir`:
/// four tasks per modality, reference trajectories annotated by running
/// their plans. Deterministic: the same bytes on every call.
std::vector<TaskSpec> generate_fixtures(const fs::path& dir, const tools::Registry& registry);

} // namespace geoagent::bench
