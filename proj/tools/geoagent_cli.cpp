// SPDX-License-Identifier: Apache-2.0
// geoagent: tool server, agent runner and benchmark driver.
#include <cstdlib>
#include <csignal>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "geoagent/bench/runner.hpp"
#include "geoagent/tools/mcp.hpp"

namespace fs = std::filesystem;
using namespace geoagent;
using bench::json;

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : std::move(fallback);
}

// Values from --config; command line, then env, then file.
struct FileConfig {
    json values = json::object();

    static FileConfig load(const std::string& path) {
        FileConfig c;
        if (path.empty()) return c;
        c.values = bench::read_json_file(path);
        if (!c.values.is_object()) throw Error(Errc::SchemaError, "config: top level must be an object");
        return c;
    }

    // Fill `target` unless the command line set `opt` or `env` is set.
    template <class T>
    void apply(const char* key, T& target, const CLI::Option* opt, const char* env = nullptr) const {
        if (!values.contains(key) || (opt && opt->count() > 0)) return;
        if (env && std::getenv(env) && *std::getenv(env)) return;
        try {
            target = values.at(key).get<T>();
        } catch (const json::exception&) {
            throw Error(Errc::SchemaError, std::string("config: '") + key + "' has the wrong type");
        }
    }
};

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

int fail(const std::string& code, const std::string& message, int status = 2) {
    std::cerr << json{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
    return status;
}

agent::Regime regime_arg(const std::string& s) {
    const auto r = agent::parse_regime(s);
    if (!r) throw Error(Errc::InvalidArgument, "regime must be 'ap' or 'if', got '" + s + "'");
    return *r;
}

std::vector<agent::Regime> regimes_arg(const std::string& s) {
    std::vector<agent::Regime> out;
    std::stringstream in(s);
    for (std::string part; std::getline(in, part, ',');)
        if (!part.empty()) out.push_back(regime_arg(part));
    if (out.empty()) throw Error(Errc::InvalidArgument, "no regime given");
    return out;
}

struct PolicyChoice {
    bench::PolicyFactory factory;
    std::string model;
};

// "llm" | "replay" | "script:<plan.json>"
PolicyChoice policy_arg(const std::string& spec, const tools::Registry& registry, bool no_tools,
                        const FileConfig& file) {
    if (spec == "replay") return {bench::replay_factory(), "replay"};
    if (spec.rfind("script:", 0) == 0) {
        const fs::path plan = spec.substr(7);
        return {bench::script_factory(bench::read_json_file(plan)), "script:" + plan.stem().string()};
    }
    if (spec == "llm") {
        agent::LlmConfig cfg;
        file.apply("llm_endpoint", cfg.endpoint, nullptr);
        file.apply("llm_api_key", cfg.api_key, nullptr);
        file.apply("llm_model", cfg.model, nullptr);
        if (const auto env = agent::LlmConfig::from_env()) {
            cfg.endpoint = env->endpoint;
            if (!env->api_key.empty()) cfg.api_key = env->api_key;
            if (!env->model.empty()) cfg.model = env->model;
        }
        if (cfg.endpoint.empty())
            throw Error(Errc::PolicyUnreachable, "no LLM endpoint: set LLM_ENDPOINT or llm_endpoint in --config");
        cfg.no_tool_mode = no_tools;
        const std::string model = cfg.model.empty() ? "llm" : cfg.model;
        return {bench::llm_factory(registry, cfg), model};
    }
    throw Error(Errc::InvalidArgument, "policy must be llm, replay or script:<file>, got '" + spec + "'");
}

std::unique_ptr<perception::ExpertBackend> expert_for(const raster::Workspace& ws, const std::string& manifest,
                                                      const std::string& url) {
    if (!url.empty()) return std::make_unique<perception::HttpBackend>(ws, url);
    fs::path m = manifest;
    if (m.empty() && !ws.data_root().empty()) m = ws.data_root() / bench::kExpertManifest;
    std::error_code ec;
    if (!m.empty() && fs::is_regular_file(m, ec))
        return std::make_unique<perception::MockBackend>(perception::MockBackend::from_file(ws, m));
    return nullptr;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geospatial tool server, agent runner and benchmark driver"};
    app.require_subcommand(1);
    std::string workspace = env_or("WORKSPACE_ROOT", ".");
    auto* workspace_opt = app.add_option("--workspace", workspace, "Workspace root for outputs (env WORKSPACE_ROOT)");
    std::string config_file;
    app.add_option("--config", config_file, "JSON settings file; command line and env take precedence");

    // tools
    auto* list_cmd = app.add_subcommand("tools", "List registered tools");
    bool list_json = false;
    list_cmd->add_flag("--json", list_json, "Print MCP listing entries");

    // serve
    auto* serve = app.add_subcommand("serve", "Serve the tool registry over MCP");
    std::string transport = "stdio", host = "127.0.0.1", data_root, manifest, expert_url = env_or("EXPERT_URL", "");
    int port = 0;
    serve->add_option("--transport", transport, "stdio or tcp")->check(CLI::IsMember({"stdio", "tcp"}));
    auto* host_opt = serve->add_option("--host", host, "TCP bind address");
    auto* port_opt = serve->add_option("--port", port, "TCP port (0 picks one)");
    auto* data_root_opt = serve->add_option("--data-root", data_root, "Read-only input directory");
    auto* manifest_opt = serve->add_option("--expert-manifest", manifest, "Mock expert answers");
    auto* expert_url_opt =
        serve->add_option("--expert-url", expert_url, "Expert inference service base URL (env EXPERT_URL)");

    // run
    auto* run = app.add_subcommand("run", "Run one task");
    std::string task_file, regime = "ap", policy = "llm", runs_dir = "runs";
    bool no_tools = false;
    std::size_t max_steps = 25;
    long timeout_ms = 0;
    run->add_option("--task", task_file, "Task JSON")->required();
    run->add_option("--regime", regime, "ap or if");
    run->add_option("--policy", policy, "llm, replay or script:<plan.json>");
    run->add_flag("--no-tools", no_tools, "Ablation: answer without tool calls");
    auto* run_steps_opt = run->add_option("--max-steps", max_steps, "Step limit");
    auto* run_timeout_opt = run->add_option("--tool-timeout-ms", timeout_ms, "Per-call limit (0 = none)");
    auto* run_runs_opt = run->add_option("--runs", runs_dir, "Directory for workspaces and records");

    // bench
    auto* benchc = app.add_subcommand("bench", "Run a task suite and aggregate");
    std::string tasks_dir = "fixtures/tasks", regimes = "ap,if";
    std::size_t parallel = 1;
    benchc->add_option("--tasks", tasks_dir, "Directory of task JSON files");
    benchc->add_option("--regimes", regimes, "Comma-separated: ap,if");
    benchc->add_option("--policy", policy, "llm, replay or script:<plan.json>");
    benchc->add_flag("--no-tools", no_tools, "Ablation: answer without tool calls");
    auto* bench_steps_opt = benchc->add_option("--max-steps", max_steps, "Step limit");
    auto* bench_timeout_opt = benchc->add_option("--tool-timeout-ms", timeout_ms, "Per-call limit (0 = none)");
    auto* bench_runs_opt = benchc->add_option("--runs", runs_dir, "Output directory");
    auto* parallel_opt = benchc->add_option("--parallel", parallel, "Concurrent episodes");

    // eval
    auto* evalc = app.add_subcommand("eval", "Score a recorded trajectory");
    std::string pred, gt;
    evalc->add_option("--pred", pred, "Trajectory record")->required();
    evalc->add_option("--gt", gt, "Task JSON")->required();

    // annotate
    auto* annotate = app.add_subcommand("annotate", "Build a reference trajectory from a plan");
    std::string plan_file, out_file;
    annotate->add_option("--plan", plan_file, "Plan JSON")->required();
    annotate->add_option("--data", data_root, "Data directory")->required();
    annotate->add_option("--out", out_file, "Write here instead of stdout");

    // fixtures
    auto* fixtures = app.add_subcommand("fixtures", "Regenerate the shipped fixture suite");
    std::string fixture_dir = "fixtures";
    fixtures->add_option("--out", fixture_dir, "Target directory");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto file = FileConfig::load(config_file);
        file.apply("workspace", workspace, workspace_opt, "WORKSPACE_ROOT");
        file.apply("host", host, host_opt);
        file.apply("port", port, port_opt);
        file.apply("data_root", data_root, data_root_opt);
        file.apply("expert_manifest", manifest, manifest_opt);
        file.apply("expert_url", expert_url, expert_url_opt, "EXPERT_URL");
        const bool in_bench = benchc->parsed();
        file.apply("max_steps", max_steps, in_bench ? bench_steps_opt : run_steps_opt);
        file.apply("tool_timeout_ms", timeout_ms, in_bench ? bench_timeout_opt : run_timeout_opt);
        file.apply("runs", runs_dir, in_bench ? bench_runs_opt : run_runs_opt);
        file.apply("parallel", parallel, parallel_opt);

        const tools::Registry registry = tools::build_default_registry();

        if (*list_cmd) {
            for (const auto* spec : registry.list()) {
                if (list_json)
                    std::cout << spec->listing().dump() << '\n';
                else
                    std::cout << spec->category << '\t' << spec->name << '\t' << spec->description << '\n';
            }
            if (!list_json) std::cout << registry.size() << " tools\n";
            return 0;
        }

        if (*serve) {
            const raster::Workspace ws(fs::absolute(workspace), data_root.empty() ? fs::path() : fs::absolute(data_root));
            const auto expert = expert_for(ws, manifest, expert_url);
            const tools::McpServer server(registry, tools::ToolContext{&ws, expert.get()});
            if (transport == "stdio") {
                std::ios::sync_with_stdio(false);
                server.serve_stream(std::cin, std::cout);
                return 0;
            }
            tools::TcpServer tcp(server, host, static_cast<std::uint16_t>(port));
            std::cerr << json{{"listening", {{"host", host}, {"port", tcp.port()}}}}.dump() << std::endl;
            tcp.run();
            return 0;
        }

        agent::EpisodeConfig episode;
        episode.max_steps = max_steps;
        episode.tool_timeout = std::chrono::milliseconds(timeout_ms);
        episode.no_tool_mode = no_tools;

        if (*run) {
            const auto task = bench::load_task(task_file, &registry);
            const auto choice = policy_arg(policy, registry, no_tools, file);
            bench::RunOptions opts;
            opts.episode = episode;
            opts.model = choice.model;
            opts.runs_dir = fs::absolute(runs_dir);
            const auto out = bench::run_task(task, regime_arg(regime), registry, choice.factory, opts);
            const std::string error = out.error.empty() ? out.record.trajectory.policy_error : out.error;
            print({{"record", out.record_path.string()}, {"report", out.report.to_json()}, {"error", error}});
            return error.empty() ? 0 : 1;
        }

        if (*benchc) {
            const auto tasks = bench::load_tasks(tasks_dir, &registry);
            const auto choice = policy_arg(policy, registry, no_tools, file);
            bench::RunOptions opts;
            opts.regimes = regimes_arg(regimes);
            opts.episode = episode;
            opts.model = choice.model;
            opts.runs_dir = fs::absolute(runs_dir);
            opts.parallelism = parallel;
            const auto report = bench::run_benchmark(tasks, registry, choice.factory, opts);
            std::cout << report.to_text();
            return 0;
        }

        if (*evalc) {
            const auto record = bench::TrajectoryRecord::from_json(bench::read_json_file(pred));
            const auto task = bench::load_task(gt, &registry);
            eval::ParamOptions params;
            params.roots = {task.data_root.generic_string(), record.trajectory.goal.data_dir};
            auto report = eval::score_task(record.trajectory, task.ground_truth, params, &registry);
            report.task_id = task.id;
            report.modality = std::string(bench::modality_name(task.modality));
            report.model = record.model;
            print(report.to_json());
            return 0;
        }

        if (*annotate) {
            const auto plan = bench::Plan::from_json(bench::read_json_file(plan_file));
            const fs::path scratch = fs::absolute(workspace) / ".annotate";
            fs::create_directories(scratch);
            const bench::TaskEnv env(scratch, fs::weakly_canonical(data_root));
            const auto truth = bench::annotate_from_plan(plan, registry, env.context());
            json out = {{"answer_rule", truth.rule.to_json()}, {"ground_truth", bench::ground_truth_to_json(truth)}};
            if (out_file.empty())
                print(out);
            else
                bench::write_json_file(out_file, out);
            return 0;
        }

        if (*fixtures) {
            const auto tasks = bench::generate_fixtures(fixture_dir, registry);
            std::cout << "wrote " << tasks.size() << " tasks to " << fixture_dir << '\n';
            return 0;
        }
    } catch (const Error& e) {
        return fail(std::string(errc_name(e.code())), e.what());
    } catch (const std::exception& e) {
        return fail("Internal", e.what());
    }
    return 0;
}
