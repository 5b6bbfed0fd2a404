// SPDX-License-Identifier: Apache-2.0
#include "geoagent/bench/runner.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

namespace geoagent::bench {

TaskEnv::TaskEnv(const fs::path& out_root, const fs::path& data_root)
    : ws_(out_root, data_root) {
    const fs::path manifest = data_root / kExpertManifest;
    std::error_code ec;
    if (!data_root.empty() && fs::is_regular_file(manifest, ec))
        expert_ = std::make_unique<perception::MockBackend>(perception::MockBackend::from_file(ws_, manifest));
    ctx_ = tools::ToolContext{&ws_, expert_.get()};
}

std::vector<std::string> TaskEnv::roots() const {
    std::vector<std::string> out;
    for (const fs::path& r : {ws_.root(), ws_.data_root()}) {
        if (r.empty()) continue;
        for (const fs::path& p : {r, fs::weakly_canonical(r)}) {
            const std::string s = p.lexically_normal().generic_string();
            if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
        }
    }
    return out;
}

PolicyFactory replay_factory() {
    return [](const TaskSpec& task, agent::Regime) -> std::unique_ptr<agent::Policy> {
        return std::make_unique<agent::ScriptedPolicy>(
            agent::ScriptedPolicy::from_json(ground_truth_to_json(task.ground_truth)));
    };
}

PolicyFactory script_factory(json plan) {
    (void)agent::ScriptedPolicy::from_json(plan);
    return [plan = std::move(plan)](const TaskSpec&, agent::Regime) -> std::unique_ptr<agent::Policy> {
        return std::make_unique<agent::ScriptedPolicy>(agent::ScriptedPolicy::from_json(plan));
    };
}

PolicyFactory llm_factory(const tools::Registry& registry, agent::LlmConfig config) {
    return [&registry, config = std::move(config)](const TaskSpec&,
                                                   agent::Regime) -> std::unique_ptr<agent::Policy> {
        return std::make_unique<agent::LlmPolicy>(registry, config);
    };
}

TaskOutcome run_task(const TaskSpec& task, agent::Regime regime, const tools::Registry& registry,
                     const PolicyFactory& factory, const RunOptions& opts) {
    TaskOutcome out;
    out.task_id = task.id;
    out.regime = regime;
    const fs::path dir = opts.runs_dir / task.id / std::string(agent::regime_name(regime));
    out.record_path = dir / "trajectory.json";

    auto& rec = out.record;
    rec.task_id = task.id;
    rec.model = opts.model;
    rec.started_at = utc_now();
    agent::Trajectory& t = rec.trajectory;
    t.goal = {task.query(regime), regime, task.data_root.string()};
    eval::ParamOptions params;
    try {
        std::error_code ec;
        fs::remove_all(dir, ec);
        fs::create_directories(dir / "workspace");
        const TaskEnv env(dir / "workspace", task.data_root);
        params.roots = env.roots();
        auto policy = factory(task, regime);
        t = agent::run_episode(t.goal, *policy, registry, env.context(), opts.episode);
    } catch (const std::exception& e) {
        out.error = e.what();
        t.stop = agent::StopReason::PolicyFailure;
        t.policy_error = out.error;
    }
    rec.finished_at = utc_now();

    out.report = eval::score_task(t, task.ground_truth, params, &registry);
    out.report.task_id = task.id;
    out.report.modality = std::string(modality_name(task.modality));
    out.report.model = opts.model;
    try {
        write_json_file(out.record_path, rec.to_json());
    } catch (const std::exception& e) {
        if (out.error.empty()) out.error = e.what();
    }
    return out;
}

json BenchReport::to_json() const {
    json tasks = json::array();
    json failures = json::array();
    for (const auto& o : outcomes) {
        tasks.push_back(o.report.to_json());
        if (!o.error.empty())
            failures.push_back({{"task_id", o.task_id},
                                {"regime", agent::regime_name(o.regime)},
                                {"error", o.error}});
    }
    return {{"tasks", tasks},
            {"run_errors", failures},
            {"by_regime", by_regime.to_json()},
            {"by_regime_modality", by_regime_modality.to_json()}};
}

std::string BenchReport::to_text() const {
    std::vector<eval::TaskReport> reports;
    for (const auto& o : outcomes) reports.push_back(o.report);
    std::string out = "By regime\n" + by_regime.to_text() + "\nBy regime and modality\n" +
                      by_regime_modality.to_text() + "\n" + eval::regime_table_text(reports);
    for (const auto& o : outcomes)
        if (!o.error.empty())
            out += "run error: " + o.task_id + " [" + std::string(agent::regime_name(o.regime)) + "] " + o.error + "\n";
    return out;
}

BenchReport run_benchmark(const std::vector<TaskSpec>& tasks, const tools::Registry& registry,
                          const PolicyFactory& factory, const RunOptions& opts) {
    if (tasks.empty()) throw Error(Errc::EmptyInput, "no tasks to run");
    if (opts.regimes.empty()) throw Error(Errc::EmptyInput, "no regimes selected");
    if (opts.runs_dir.empty()) throw Error(Errc::InvalidArgument, "runs directory not set");

    struct Job {
        const TaskSpec* task;
        agent::Regime regime;
    };
    std::vector<Job> jobs;
    for (const auto& t : tasks)
        for (agent::Regime r : opts.regimes) jobs.push_back({&t, r});

    BenchReport report;
    report.outcomes.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++)
            report.outcomes[i] = run_task(*jobs[i].task, jobs[i].regime, registry, factory, opts);
    };
    const std::size_t n = std::clamp<std::size_t>(opts.parallelism, 1, jobs.size());
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::vector<eval::TaskReport> reports;
    for (const auto& o : report.outcomes) reports.push_back(o.report);
    report.by_regime = eval::aggregate(reports, {eval::GroupKey::Regime});
    report.by_regime_modality = eval::aggregate(reports, {eval::GroupKey::Regime, eval::GroupKey::Modality});

    write_json_file(opts.runs_dir / "report.json", report.to_json());
    std::ofstream(opts.runs_dir / "report.txt", std::ios::binary | std::ios::trunc) << report.to_text();
    return report;
}

} // namespace geoagent::bench
