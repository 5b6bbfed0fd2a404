// SPDX-License-Identifier: Apache-2.0
#include <deque>
#include <mutex>
#include <set>
#include <thread>

#include "doctest.h"
#include "geoagent/agent/policy.hpp"
#include "httplib.h"
#include "test_util.hpp"

using namespace geoagent;
using namespace geoagent::agent;
using tools::ErrorClass;
using tools::Registry;
using tools::ToolContext;
using tools::ToolResult;
using testutil::TempDir;

namespace {

const Registry& registry() {
    static const Registry r = tools::build_default_registry();
    return r;
}

struct Env {
    TempDir dir;
    raster::Workspace ws{dir.path()};
    ToolContext ctx{&ws, nullptr};
};

Goal goal(std::string q = "What is 2 times 3, in Celsius if read as Kelvin?") {
    return {std::move(q), Regime::AutoPlanning, "data"};
}

/// multiply(2, 3) -> kelvin_to_celsius(<step 0>) -> ceil_number(<step 1>)
ScriptedPolicy three_step_plan() {
    return ScriptedPolicy(
        {{"multiply", {{"a", 2}, {"b", 3}}},
         {"kelvin_to_celsius", {{"kelvin", {{"$from", 0}}}}},
         {"ceil_number", {{"number", {{"$from", -1}}}}}},
        FinalAnswer{"", {{"$from", -1}}});
}

Action step(std::string tool, std::string text) {
    return {std::move(tool), tools::json::object(), ToolResult::success(text, text)};
}

/// Chat-completions stand-in: replies from a queue and keeps every request.
struct FakeLlm {
    httplib::Server srv;
    std::thread th;
    int port = 0;
    std::mutex mu;
    std::deque<json> replies;
    std::vector<json> requests;

    FakeLlm() {
        srv.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard<std::mutex> lock(mu);
            requests.push_back(json::parse(req.body));
            if (replies.empty()) {
                res.status = 500;
                res.set_content("no scripted reply", "text/plain");
                return;
            }
            res.set_content(replies.front().dump(), "application/json");
            replies.pop_front();
        });
        port = srv.bind_to_any_port("127.0.0.1");
        th = std::thread([this] { srv.listen_after_bind(); });
        srv.wait_until_ready();
    }
    ~FakeLlm() {
        srv.stop();
        th.join();
    }

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1"; }

    LlmConfig config(bool no_tools = false) const {
        LlmConfig c;
        c.endpoint = endpoint();
        c.model = "fake-model";
        c.retries = 0;
        c.timeout = std::chrono::milliseconds(5000);
        c.no_tool_mode = no_tools;
        return c;
    }

    static json tool_reply(const std::string& name, const std::string& args) {
        return {{"choices",
                 json::array({{{"message",
                                {{"role", "assistant"},
                                 {"content", nullptr},
                                 {"tool_calls",
                                  json::array({{{"id", "x"},
                                                {"type", "function"},
                                                {"function", {{"name", name}, {"arguments", args}}}}})}}}}})},
                {"usage", {{"prompt_tokens", 100}, {"completion_tokens", 7}}}};
    }
    static json text_reply(const std::string& text) {
        return {{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", text}}}}})},
                {"usage", {{"prompt_tokens", 120}, {"completion_tokens", 9}}}};
    }
};

} // namespace

TEST_CASE("render: empty memory gives system and user") {
    const json msgs = render_memory(goal(), Memory{});
    REQUIRE(msgs.size() == 2);
    CHECK(msgs[0]["role"] == "system");
    CHECK(msgs[1]["role"] == "user");
    CHECK(msgs[1]["content"] == goal().query);
    CHECK(msgs[0]["content"].get<std::string>().find("Data directory: data") != std::string::npos);
}

TEST_CASE("render: each step adds an assistant call and a tool result") {
    Memory m;
    m.append({"multiply", {{"a", 2}, {"b", 3}}, ToolResult::success(6.0)});
    m.append({"nope", json::object(),
              ToolResult::failure(ErrorClass::ToolHallucination, "unknown tool 'nope'")});
    const json msgs = render_memory(goal(), m);
    REQUIRE(msgs.size() == 2 + 2 * 2);
    const std::vector<std::string> roles{"system", "user", "assistant", "tool", "assistant", "tool"};
    for (std::size_t i = 0; i < roles.size(); ++i) CHECK(msgs[i]["role"] == roles[i]);
    const json& call = msgs[2]["tool_calls"][0];
    CHECK(call["id"] == "call_0");
    CHECK(call["function"]["name"] == "multiply");
    CHECK(json::parse(call["function"]["arguments"].get<std::string>()) == json{{"a", 2}, {"b", 3}});
    CHECK(msgs[3]["tool_call_id"] == "call_0");
    CHECK(msgs[3]["content"] == "6.0");
    CHECK(msgs[5]["tool_call_id"] == "call_1");
    CHECK(msgs[5]["content"] == "Error [ToolHallucination]: unknown tool 'nope'");
    CHECK(render_memory(goal(), m) == msgs);
}

TEST_CASE("render: a 1 MB observation is truncated within budget") {
    // Multibyte payload so a naive cut would split a character.
    std::string big;
    while (big.size() < (1u << 20)) big += "\xc3\xa9t\xc3\xa9 ";
    Memory m;
    m.append({"get_filelist", json::object(), ToolResult::success(big)});
    for (std::size_t budget : {64u, 100u, 1000u, 8192u, 8193u}) {
        CAPTURE(budget);
        const std::string shown =
            render_memory(goal(), m, {"", budget, false})[3]["content"].get<std::string>();
        CHECK(shown.size() <= budget);
        const auto at = shown.rfind("\n[truncated: showed ");
        REQUIRE(at != std::string::npos);
        CHECK(shown.substr(at + 1) ==
              "[truncated: showed " + std::to_string(at) + " of " + std::to_string(big.size()) + " bytes]");
        CHECK(big.compare(0, at, shown, 0, at) == 0);
        // kept prefix ends on a character boundary
        CHECK((static_cast<unsigned char>(big[at]) & 0xC0) != 0x80);
    }
    CHECK(truncate_observation("short", 8192) == "short");
    CHECK(truncate_observation(std::string(8192, 'x'), 8192) == std::string(8192, 'x'));
}

TEST_CASE("answer values are parsed from free text") {
    CHECK(parse_answer_value("The mean LST is 307.97 K.\nFinal answer: 307.97") == 307.97);
    CHECK(parse_answer_value("Final answer: 307.97 K") == 307.97);
    CHECK(parse_answer_value("final answer: **Airport**") == "Airport");
    CHECK(parse_answer_value("Final Answer: [1, 2]") == json::array({1, 2}));
    CHECK(parse_answer_value("about 12 of 40 scenes, so 30") == 30.0);
    CHECK(parse_answer_value("no numbers here").is_null());
    CHECK(parse_answer_value("Final answer: 1.5e3") == 1500.0);
    CHECK(parse_answer_value("Final answer: 2020 to 2023") == "2020 to 2023");
}

TEST_CASE("scripted plan replays in order and answers from the last step") {
    Env env;
    auto policy = three_step_plan();
    const Trajectory t = run_episode(goal(), policy, registry(), env.ctx);
    CHECK(t.stop == StopReason::FinalAnswer);
    REQUIRE(t.actions.size() == 3);
    CHECK(t.actions[0].tool == "multiply");
    CHECK(t.actions[1].tool == "kelvin_to_celsius");
    CHECK(t.actions[1].input == json{{"kelvin", 6.0}});
    CHECK(t.actions[2].tool == "ceil_number");
    for (const auto& a : t.actions) CHECK(a.output.ok);
    REQUIRE(t.answer.has_value());
    CHECK(t.answer->value == -267);
    CHECK(t.answer->text == "-267");
    CHECK_FALSE(t.unaware_of_termination());
}

TEST_CASE("scripted decisions ignore observations but follow the step index") {
    auto policy = three_step_plan();
    Memory m;
    m.append(step("multiply", "x"));
    const Decision d = policy.next(goal(), m);
    REQUIRE(d.is_call());
    CHECK(d.tool_call().name == "kelvin_to_celsius");
    CHECK(d.tool_call().args == json{{"kelvin", "x"}});
}

TEST_CASE("a policy that never answers stops at the step limit") {
    Env env;
    ScriptedPolicy loop({{"multiply", {{"a", 1}, {"b", 1}}}}, std::nullopt);
    for (std::size_t limit : {1u, 4u, 25u}) {
        EpisodeConfig cfg;
        cfg.max_steps = limit;
        const Trajectory t = run_episode(goal(), loop, registry(), env.ctx, cfg);
        CHECK(t.stop == StopReason::MaxSteps);
        CHECK(t.actions.size() == limit);
        CHECK(t.unaware_of_termination());
        CHECK_FALSE(t.answer.has_value());
    }
    EpisodeConfig zero;
    zero.max_steps = 0;
    CHECK_THROWS_AS(run_episode(goal(), loop, registry(), env.ctx, zero), Error);
}

TEST_CASE("tool errors are observations and the agent recovers") {
    Env env;
    ScriptedPolicy p({{"multiplyy", {{"a", 2}, {"b", 3}}},
                      {"multiply", {{"a", "2"}, {"b", 3}}},
                      {"calc_batch_image_mean", {{"file_list", {"none.tif"}}}},
                      {"multiply", {{"a", 2}, {"b", 3}}}},
                     FinalAnswer{"", {{"$from", 3}}});
    const Trajectory t = run_episode(goal(), p, registry(), env.ctx);
    CHECK(t.stop == StopReason::FinalAnswer);
    REQUIRE(t.actions.size() == 4);
    CHECK(t.actions[0].output.error_class == ErrorClass::ToolHallucination);
    CHECK(t.actions[1].output.error_class == ErrorClass::InvalidParameters);
    CHECK(t.actions[2].output.error_class == ErrorClass::FileHallucination);
    CHECK(t.actions[3].output.ok);
    CHECK(t.answer->value == 6.0);
}

TEST_CASE("memory only grows by appending") {
    // Records every memory the policy is shown.
    struct Spy : Policy {
        ScriptedPolicy inner = three_step_plan();
        std::vector<std::vector<Action>> seen;
        Decision next(const Goal& g, const Memory& m) override {
            seen.push_back(m.actions());
            return inner.next(g, m);
        }
    } spy;
    Env env;
    (void)run_episode(goal(), spy, registry(), env.ctx);
    REQUIRE(spy.seen.size() == 4);
    for (std::size_t t = 0; t + 1 < spy.seen.size(); ++t) {
        const auto& a = spy.seen[t];
        const auto& b = spy.seen[t + 1];
        REQUIRE(b.size() == a.size() + 1);
        CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }
}

TEST_CASE("replaying a recorded trajectory reproduces it") {
    Env env;
    auto policy = three_step_plan();
    const Trajectory first = run_episode(goal(), policy, registry(), env.ctx);
    auto replay = ScriptedPolicy::replay(first);
    const Trajectory again = run_episode(goal(), replay, registry(), env.ctx);
    CHECK(again.actions == first.actions);
    CHECK(again.answer == first.answer);
    CHECK(again.stop == first.stop);
}

TEST_CASE("plan documents and references") {
    const json doc = {{"steps", json::array({{{"tool", "multiply"}, {"input", {{"a", 1}, {"b", 2}}}},
                                             {{"tool", "ceil_number"}, {"args", {{"number", 1.2}}}}})},
                      {"final_answer", {{"text", "two"}, {"value", 2}}}};
    const auto p = ScriptedPolicy::from_json(doc);
    REQUIRE(p.plan().size() == 2);
    CHECK(p.plan()[1].args == json{{"number", 1.2}});
    CHECK_THROWS_AS(ScriptedPolicy::from_json(json{{"steps", 3}}), Error);
    CHECK_THROWS_AS(ScriptedPolicy::from_json(json{{"steps", json::array({{{"input", json::object()}}})}}),
                    Error);

    Memory m;
    m.append({"x", json::object(), ToolResult::success(json{{"slope", 0.5}})});
    CHECK(resolve_references(json{{"v", {{"$from", 0}, {"field", "slope"}}}}, m) == json{{"v", 0.5}});
    CHECK(resolve_references(json::array({json{{"$from", -1}}}), m) ==
          json::array({json{{"slope", 0.5}}}));
    CHECK_THROWS_AS(resolve_references(json{{"$from", 1}}, m), Error);
    CHECK_THROWS_AS(resolve_references(json{{"$from", 0}, {"field", "tau"}}, m), Error);

    // A bad reference is a policy failure, not a crash.
    Env env;
    ScriptedPolicy bad({{"ceil_number", {{"number", {{"$from", 5}}}}}}, std::nullopt);
    const Trajectory t = run_episode(goal(), bad, registry(), env.ctx);
    CHECK(t.stop == StopReason::PolicyFailure);
    CHECK(t.actions.empty());
    CHECK(t.policy_error.rfind("InvalidArgument", 0) == 0);
}

TEST_CASE("no-tool mode ends the episode on any tool call") {
    Env env;
    EpisodeConfig cfg;
    cfg.no_tool_mode = true;
    auto calls = three_step_plan();
    const Trajectory t = run_episode(goal(), calls, registry(), env.ctx, cfg);
    CHECK(t.stop == StopReason::PolicyFailure);
    CHECK(t.actions.empty());

    ScriptedPolicy direct({}, FinalAnswer{"Final answer: 6", 6});
    const Trajectory d = run_episode(goal(), direct, registry(), env.ctx, cfg);
    CHECK(d.stop == StopReason::FinalAnswer);
    CHECK(d.actions.empty());
}

TEST_CASE("tool timeout reports a system error and the loop continues") {
    static Registry slow = [] {
        Registry r;
        r.add({"nap", "Statistics", "sleeps", {}}, [](const tools::Args&, const ToolContext&) {
            std::this_thread::sleep_for(std::chrono::milliseconds(400));
            return ToolResult::success(1);
        });
        r.add({"quick", "Statistics", "returns", {}},
              [](const tools::Args&, const ToolContext&) { return ToolResult::success(2); });
        return r;
    }();
    ScriptedPolicy p({{"nap", json::object()}, {"quick", json::object()}}, FinalAnswer{"", {{"$from", 1}}});
    EpisodeConfig cfg;
    cfg.tool_timeout = std::chrono::milliseconds(50);
    const Trajectory t = run_episode(goal(), p, slow, ToolContext{}, cfg);
    REQUIRE(t.actions.size() == 2);
    CHECK(t.actions[0].output.error_class == ErrorClass::SystemError);
    CHECK(t.actions[0].output.text.find("timed out") != std::string::npos);
    CHECK(t.actions[1].output.ok);
    CHECK(t.stop == StopReason::FinalAnswer);
    std::this_thread::sleep_for(std::chrono::milliseconds(500));  // let the abandoned call finish
}

TEST_CASE("LLM request carries every registered tool exactly once") {
    FakeLlm llm;
    llm.replies = {FakeLlm::tool_reply("multiply", R"({"a": 2, "b": 3})"),
                   FakeLlm::text_reply("The product is 6.\nFinal answer: 6")};
    Env env;
    LlmPolicy policy(registry(), llm.config());
    const Trajectory t = run_episode(goal(), policy, registry(), env.ctx);

    CHECK(t.stop == StopReason::FinalAnswer);
    REQUIRE(t.actions.size() == 1);
    CHECK(t.actions[0].tool == "multiply");
    CHECK(t.actions[0].output.value == 6.0);
    CHECK(t.answer->value == 6.0);
    CHECK(t.usage.requests == 2);
    CHECK(t.usage.prompt_tokens == 220);
    CHECK(t.usage.completion_tokens == 16);

    REQUIRE(llm.requests.size() == 2);
    const json& first = llm.requests[0];
    CHECK(first["model"] == "fake-model");
    CHECK(first["tool_choice"] == "auto");
    std::multiset<std::string> names;
    for (const auto& tool : first["tools"]) {
        CHECK(tool["type"] == "function");
        CHECK(tool["function"]["parameters"]["type"] == "object");
        names.insert(tool["function"]["name"].get<std::string>());
    }
    CHECK(names.size() == registry().size());
    for (const auto* spec : registry().list()) CHECK(names.count(spec->name) == 1);
    CHECK(first["messages"].size() == 2);
    CHECK(llm.requests[1]["messages"].size() == 4);
    CHECK(llm.requests[1]["messages"][3]["content"] == "6.0");
}

TEST_CASE("LLM malformed output gets one reprompt") {
    Env env;
    SUBCASE("recovered") {
        FakeLlm llm;
        llm.replies = {FakeLlm::tool_reply("multiply", "{not json"),
                       FakeLlm::tool_reply("multiply", R"({"a": 1, "b": 5})"),
                       FakeLlm::text_reply("Final answer: 5")};
        LlmPolicy policy(registry(), llm.config());
        const Trajectory t = run_episode(goal(), policy, registry(), env.ctx);
        CHECK(t.stop == StopReason::FinalAnswer);
        REQUIRE(llm.requests.size() == 3);
        const json& retry = llm.requests[1]["messages"];
        REQUIRE(retry.size() == 4);
        CHECK(retry[3]["role"] == "user");
        CHECK(retry[3]["content"].get<std::string>().find("not valid JSON") != std::string::npos);
        CHECK(t.actions.size() == 1);
    }
    SUBCASE("twice malformed is a policy failure") {
        FakeLlm llm;
        llm.replies = {json{{"choices", json::array()}}, FakeLlm::tool_reply("multiply", "[1]")};
        LlmPolicy policy(registry(), llm.config());
        const Trajectory t = run_episode(goal(), policy, registry(), env.ctx);
        CHECK(t.stop == StopReason::PolicyFailure);
        CHECK(t.policy_error.rfind("MalformedModelOutput", 0) == 0);
        CHECK(llm.requests.size() == 2);
        CHECK(t.actions.empty());
    }
}

TEST_CASE("LLM no-tool mode omits schemas and rejects tool calls") {
    Env env;
    EpisodeConfig cfg;
    cfg.no_tool_mode = true;
    SUBCASE("direct answer") {
        FakeLlm llm;
        llm.replies = {FakeLlm::text_reply("Probably around 300 K. Final answer: 300")};
        LlmPolicy policy(registry(), llm.config(true));
        const Trajectory t = run_episode(goal(), policy, registry(), env.ctx, cfg);
        CHECK(t.stop == StopReason::FinalAnswer);
        CHECK(t.actions.empty());
        CHECK(t.answer->value == 300.0);
        REQUIRE(llm.requests.size() == 1);
        CHECK_FALSE(llm.requests[0].contains("tools"));
        CHECK_FALSE(llm.requests[0].contains("tool_choice"));
        CHECK(llm.requests[0]["messages"][0]["content"].get<std::string>().find("No tools") !=
              std::string::npos);
    }
    SUBCASE("tool call is malformed") {
        FakeLlm llm;
        llm.replies = {FakeLlm::tool_reply("multiply", "{}"), FakeLlm::tool_reply("multiply", "{}")};
        LlmPolicy policy(registry(), llm.config(true));
        const Trajectory t = run_episode(goal(), policy, registry(), env.ctx, cfg);
        CHECK(t.stop == StopReason::PolicyFailure);
        CHECK(t.actions.empty());
        CHECK(llm.requests.size() == 2);
    }
}

TEST_CASE("unreachable endpoint becomes a policy failure after retries") {
    int port = 0;
    {
        FakeLlm gone;
        port = gone.port;
    }
    LlmConfig cfg;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    cfg.retries = 2;
    cfg.timeout = std::chrono::milliseconds(500);
    LlmPolicy policy(registry(), cfg);
    Env env;
    const Trajectory t = run_episode(goal(), policy, registry(), env.ctx);
    CHECK(t.stop == StopReason::PolicyFailure);
    CHECK(t.policy_error.rfind("PolicyUnreachable", 0) == 0);
    CHECK(t.policy_error.find("after 3 attempts") != std::string::npos);

    // HTTP errors from a live server count the same way
    FakeLlm empty;
    LlmPolicy p2(registry(), empty.config());
    const Trajectory t2 = run_episode(goal(), p2, registry(), env.ctx);
    CHECK(t2.stop == StopReason::PolicyFailure);
    CHECK(empty.requests.size() == 1);
}

TEST_CASE("regime and stop reason names round-trip") {
    for (Regime r : {Regime::AutoPlanning, Regime::InstructionFollowing})
        CHECK(parse_regime(regime_name(r)) == r);
    for (StopReason s : {StopReason::FinalAnswer, StopReason::MaxSteps, StopReason::PolicyFailure})
        CHECK(parse_stop_reason(stop_reason_name(s)) == s);
    CHECK_FALSE(parse_regime("auto").has_value());
}
