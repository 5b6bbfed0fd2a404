// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "geoagent/bench/runner.hpp"
#include "test_util.hpp"

using namespace geoagent;
using namespace geoagent::bench;
using agent::Regime;
using testutil::TempDir;

namespace {

const tools::Registry& registry() {
    static const tools::Registry r = tools::build_default_registry();
    return r;
}

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        out[fs::relative(e.path(), root).generic_string()] = buf.str();
    }
    return out;
}

const fs::path kShipped = GEOAGENT_FIXTURE_DIR;

std::vector<TaskSpec> shipped_tasks() { return load_tasks(kShipped / "tasks", &registry()); }

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

RunOptions options(const fs::path& runs, std::size_t parallelism = 1) {
    RunOptions o;
    o.regimes = {Regime::AutoPlanning, Regime::InstructionFollowing};
    o.runs_dir = runs;
    o.parallelism = parallelism;
    o.model = "replay";
    return o;
}

} // namespace

TEST_CASE("fixture generation is byte-for-byte reproducible and matches the shipped suite") {
    TempDir a("fx-a"), b("fx-b");
    const auto tasks = generate_fixtures(a.path(), registry());
    (void)generate_fixtures(b.path(), registry());
    const auto bytes_a = tree_bytes(a.path());
    CHECK(bytes_a == tree_bytes(b.path()));
    CHECK(tasks.size() == 12);

    REQUIRE(fs::is_directory(kShipped));
    const auto shipped = tree_bytes(kShipped);
    CHECK(shipped.size() == bytes_a.size());
    for (const auto& [rel, data] : bytes_a) {
        INFO(rel);
        auto it = shipped.find(rel);
        REQUIRE(it != shipped.end());
        CHECK(it->second == data);
    }
}

TEST_CASE("shipped tasks load, validate and cover each modality four times") {
    const auto tasks = shipped_tasks();
    REQUIRE(tasks.size() == 12);
    std::map<Modality, int> per;
    for (const auto& t : tasks) {
        ++per[t.modality];
        CHECK(fs::is_directory(t.data_root));
        CHECK(t.query_ap != t.query_if);
        CHECK_FALSE(t.ground_truth.answer.is_null());
        for (const auto& s : t.ground_truth.steps) {
            INFO(t.id << " " << s.tool);
            CHECK(registry().contains(s.tool));
            // instruction-following queries name every tool they expect
            CHECK(t.query_if.find(s.tool) != std::string::npos);
            // no absolute path survives annotation
            CHECK(s.input.dump().find(kShipped.generic_string()) == std::string::npos);
            CHECK(s.output.dump().find("/tmp/") == std::string::npos);
        }
    }
    CHECK(per[Modality::Spectrum] == 4);
    CHECK(per[Modality::Products] == 4);
    CHECK(per[Modality::RGB] == 4);
}

TEST_CASE("task specs and plans round-trip through JSON") {
    for (const auto& t : shipped_tasks()) {
        const TaskSpec back = TaskSpec::from_json(t.to_json());
        CHECK(back.id == t.id);
        CHECK(back.modality == t.modality);
        CHECK(back.query_ap == t.query_ap);
        CHECK(back.query_if == t.query_if);
        CHECK(back.data_dir == t.data_dir);
        CHECK(back.ground_truth == t.ground_truth);
        CHECK(back.to_json() == t.to_json());

        const Plan plan = Plan::from_json(read_json_file(kShipped / "plans" / (t.id + ".json")));
        CHECK(plan.rule == t.ground_truth.rule);
        CHECK(Plan::from_json(plan.to_json()).to_json() == plan.to_json());
    }
    for (const char* m : {"Spectrum", "Products", "RGB"}) CHECK(modality_name(*parse_modality(m)) == m);
    CHECK_FALSE(parse_modality("rgb"));
}

TEST_CASE("malformed task files are rejected with the right code") {
    TempDir dir("tasks");
    json good = shipped_tasks().front().to_json();
    good["data_dir"] = "data";
    fs::create_directories(dir / "data");

    auto write = [&](const json& j) {
        write_json_file(dir / "t.json", j);
        return dir / "t.json";
    };
    CHECK_NOTHROW(load_task(write(good), &registry()));

    json j = good;
    j["data_dir"] = "missing";
    CHECK(code_of([&] { load_task(write(j)); }) == Errc::MissingDirectory);
    j = good;
    j["modality"] = "Radar";
    CHECK(code_of([&] { load_task(write(j)); }) == Errc::SchemaError);
    j = good;
    j.erase("query_if");
    CHECK(code_of([&] { load_task(write(j)); }) == Errc::SchemaError);
    j = good;
    j["ground_truth"]["steps"][0]["tool"] = "make_it_up";
    CHECK_NOTHROW(load_task(write(j)));
    CHECK(code_of([&] { load_task(write(j), &registry()); }) == Errc::SchemaError);
    j = good;
    j["ground_truth"]["steps"] = json::array();
    CHECK(code_of([&] { load_task(write(j)); }) == Errc::SchemaError);
    j = good;
    j["answer_rule"] = {{"kind", "numeric"}, {"rel_tol", -1}};
    CHECK(code_of([&] { load_task(write(j)); }) == Errc::SchemaError);
    CHECK(code_of([&] { read_json_file(dir / "nope.json"); }) == Errc::MissingFile);
    std::ofstream(dir / "bad.json") << "{";
    CHECK(code_of([&] { read_json_file(dir / "bad.json"); }) == Errc::SchemaError);
}

TEST_CASE("annotation records outputs, is deterministic and aborts on the failing step") {
    const auto task = shipped_tasks().front();
    const Plan plan = Plan::from_json(read_json_file(kShipped / "plans" / (task.id + ".json")));

    TempDir w1("ann"), w2("ann");
    const TaskEnv e1(w1.path(), task.data_root), e2(w2.path(), task.data_root);
    const auto g1 = annotate_from_plan(plan, registry(), e1.context());
    const auto g2 = annotate_from_plan(plan, registry(), e2.context());
    CHECK(g1 == g2);
    CHECK(g1 == task.ground_truth);
    for (const auto& s : g1.steps) CHECK(s.output.at("status") == "ok");

    Plan bad = plan;
    bad.steps.insert(bad.steps.begin(), {"no_such_tool", json::object()});
    try {
        annotate_from_plan(bad, registry(), e1.context());
        FAIL("expected failure");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidArgument);
        REQUIRE(e.item_index());
        CHECK(*e.item_index() == 0);
        CHECK(std::string(e.what()).find("ToolHallucination") != std::string::npos);
    }

    Plan late = plan;
    late.steps.push_back({"calculate_area", {{"image_path", "not_here.tif"}}});
    try {
        annotate_from_plan(late, registry(), e1.context());
        FAIL("expected failure");
    } catch (const Error& e) {
        REQUIRE(e.item_index());
        CHECK(*e.item_index() == plan.steps.size());
        CHECK(std::string(e.what()).find("FileHallucination") != std::string::npos);
    }

    Plan dangling = plan;
    dangling.steps[0].args = {{"x", {{"$from", 5}}}};
    try {
        annotate_from_plan(dangling, registry(), e1.context());
        FAIL("expected failure");
    } catch (const Error& e) {
        REQUIRE(e.item_index());
        CHECK(*e.item_index() == 0);
    }

    CHECK(code_of([&] { annotate_from_plan(Plan{}, registry(), e1.context()); }) == Errc::EmptyInput);
}

TEST_CASE("relativize strips workspace and data roots wherever they occur") {
    TempDir root("rel");
    const std::string r = root.path().generic_string();
    const json in = {{"a", r + "/x/y.tif"},
                     {"b", {"Result saved at " + r + "/z.tif", 3}},
                     {"c", "/elsewhere/q.tif"},
                     {"d", r}};
    const json out = relativize(in, {root.path()});
    CHECK(out["a"] == "x/y.tif");
    CHECK(out["b"][0] == "Result saved at z.tif");
    CHECK(out["b"][1] == 3);
    CHECK(out["c"] == "/elsewhere/q.tif");
    CHECK(out["d"] == ".");
}

TEST_CASE("replaying the references scores perfectly in both regimes") {
    TempDir runs("runs");
    const auto tasks = shipped_tasks();
    const auto report = run_benchmark(tasks, registry(), replay_factory(), options(runs.path()));
    REQUIRE(report.outcomes.size() == 2 * tasks.size());
    for (const auto& o : report.outcomes) {
        INFO(o.task_id << " " << agent::regime_name(o.regime) << " " << o.error << " "
                       << o.report.accuracy_reason);
        CHECK(o.error.empty());
        CHECK(o.record.trajectory.stop == agent::StopReason::FinalAnswer);
        CHECK(o.report.scores == eval::TaskScores{1, 1, 1, 1, 1, 1});
        CHECK(o.report.errors.total() == 0);
        CHECK(fs::is_regular_file(o.record_path));
    }
    REQUIRE(report.by_regime.rows.size() == 2);
    for (const auto& row : report.by_regime.rows) {
        CHECK(row.tasks == tasks.size());
        CHECK(row.means.accuracy == doctest::Approx(100.0));
        CHECK(row.means.param == doctest::Approx(1.0));
    }
    CHECK(report.by_regime_modality.rows.size() == 6);
    CHECK(fs::is_regular_file(runs / "report.json"));
    CHECK(fs::is_regular_file(runs / "report.txt"));
    CHECK(read_json_file(runs / "report.json") == report.to_json());
}

TEST_CASE("records round-trip and validation names the broken field") {
    TempDir runs("rec");
    const auto tasks = shipped_tasks();
    const auto o = run_task(tasks.back(), Regime::InstructionFollowing, registry(), replay_factory(),
                            options(runs.path()));
    const json doc = read_json_file(o.record_path);
    const auto back = TrajectoryRecord::from_json(doc);
    CHECK(back == o.record);
    CHECK(back.to_json() == doc);
    CHECK(doc["metadata"]["regime"] == "if");

    auto rejects = [](json j, const std::string& needle) {
        try {
            validate_record(j);
            return false;
        } catch (const Error& e) {
            return e.code() == Errc::SchemaError && std::string(e.what()).find(needle) != std::string::npos;
        }
    };
    json j = doc;
    j.erase("steps");
    CHECK(rejects(j, "steps"));
    j = doc;
    j["metadata"]["regime"] = "xx";
    CHECK(rejects(j, "regime"));
    j = doc;
    j["final"]["stop_reason"] = "max_steps";
    CHECK(rejects(j, "final.answer"));
    j = doc;
    j["steps"][0]["output"]["status"] = "error";
    CHECK_FALSE(rejects(j, "zzz"));
    j = doc;
    j["metadata"]["usage"]["requests"] = "many";
    CHECK(rejects(j, "requests"));
}

TEST_CASE("parallel and sequential benchmark runs give identical reports") {
    TempDir r1("p1"), r4("p4");
    const auto tasks = shipped_tasks();
    const auto seq = run_benchmark(tasks, registry(), replay_factory(), options(r1.path(), 1));
    const auto par = run_benchmark(tasks, registry(), replay_factory(), options(r4.path(), 4));
    CHECK(seq.to_json() == par.to_json());
    CHECK(seq.to_text() == par.to_text());
}

TEST_CASE("an extra leading tool breaks exact match but keeps the tool set") {
    TempDir runs("adv");
    const auto tasks = shipped_tasks();
    PolicyFactory padded = [](const TaskSpec& t, Regime) -> std::unique_ptr<agent::Policy> {
        json doc = ground_truth_to_json(t.ground_truth);
        doc["steps"].insert(doc["steps"].begin(), json{{"tool", "kelvin_to_celsius"}, {"input", {{"kelvin", 300}}}});
        return std::make_unique<agent::ScriptedPolicy>(agent::ScriptedPolicy::from_json(doc));
    };
    const auto report = run_benchmark(tasks, registry(), padded, options(runs.path()));
    for (const auto& o : report.outcomes) {
        INFO(o.task_id);
        const double n = static_cast<double>(o.record.trajectory.actions.size() - 1);
        CHECK(o.report.scores.tem == 0.0);
        CHECK(o.report.scores.tao == 1.0);
        CHECK(o.report.scores.tio == 1.0);
        CHECK(o.report.scores.param == 0.0);
        CHECK(o.report.scores.efficiency == doctest::Approx((n + 1) / n));
        CHECK(o.report.scores.accuracy == 1.0);
    }
}

TEST_CASE("a task that cannot run is reported, not thrown") {
    TempDir runs("fail");
    const auto tasks = shipped_tasks();
    PolicyFactory broken = [](const TaskSpec&, Regime) -> std::unique_ptr<agent::Policy> {
        throw Error(Errc::PolicyUnreachable, "endpoint down");
    };
    const auto o = run_task(tasks.front(), Regime::AutoPlanning, registry(), broken, options(runs.path()));
    CHECK(o.error.find("endpoint down") != std::string::npos);
    CHECK(o.record.trajectory.stop == agent::StopReason::PolicyFailure);
    CHECK(o.report.scores == eval::TaskScores{});
    CHECK(o.report.stop_reason == "policy_failure");
    CHECK(fs::is_regular_file(o.record_path));

    CHECK(code_of([&] { run_benchmark({}, registry(), broken, options(runs.path())); }) == Errc::EmptyInput);
    RunOptions no_dir = options({});
    CHECK(code_of([&] { run_benchmark(tasks, registry(), broken, no_dir); }) == Errc::InvalidArgument);
}

TEST_CASE("the mock expert backend is wired only where a manifest exists") {
    TempDir ws("env");
    int wired = 0;
    for (const auto& t : shipped_tasks()) {
        const TaskEnv env(ws.path(), t.data_root);
        const bool manifest = fs::is_regular_file(t.data_root / kExpertManifest);
        CHECK((env.context().expert != nullptr) == manifest);
        if (manifest) CHECK(t.modality == Modality::RGB);
        wired += manifest;
        CHECK_FALSE(env.roots().empty());
    }
    CHECK(wired == 3);
}
