// SPDX-License-Identifier: Apache-2.0
#include "geoagent/agent/episode.hpp"

#include <future>
#include <memory>
#include <thread>

namespace geoagent::agent {

std::string_view regime_name(Regime r) noexcept {
    return r == Regime::AutoPlanning ? "ap" : "if";
}

std::optional<Regime> parse_regime(std::string_view s) noexcept {
    if (s == "ap") return Regime::AutoPlanning;
    if (s == "if") return Regime::InstructionFollowing;
    return std::nullopt;
}

std::string_view stop_reason_name(StopReason s) noexcept {
    switch (s) {
    case StopReason::FinalAnswer: return "final_answer";
    case StopReason::MaxSteps: return "max_steps";
    case StopReason::PolicyFailure: return "policy_failure";
    }
    return "policy_failure";
}

std::optional<StopReason> parse_stop_reason(std::string_view s) noexcept {
    for (StopReason r : {StopReason::FinalAnswer, StopReason::MaxSteps, StopReason::PolicyFailure})
        if (stop_reason_name(r) == s) return r;
    return std::nullopt;
}

tools::ToolResult call_with_timeout(const tools::Registry& registry, const std::string& name,
                                    const json& args, const tools::ToolContext& ctx,
                                    std::chrono::milliseconds timeout) {
    if (timeout.count() <= 0) return registry.call(name, args, ctx);
    auto done = std::make_shared<std::promise<tools::ToolResult>>();
    auto fut = done->get_future();
    std::thread([done, &registry, name, args, ctx] {
        done->set_value(registry.call(name, args, ctx));
    }).detach();
    if (fut.wait_for(timeout) == std::future_status::ready) return fut.get();
    return tools::ToolResult::failure(tools::ErrorClass::SystemError,
                                      "tool '" + name + "' timed out after " +
                                          std::to_string(timeout.count()) + " ms");
}

Trajectory run_episode(const Goal& goal, Policy& policy, const tools::Registry& registry,
                       const tools::ToolContext& ctx, const EpisodeConfig& config) {
    if (config.max_steps == 0) throw Error(Errc::InvalidArgument, "max_steps must be at least 1");
    const auto start = std::chrono::steady_clock::now();
    Trajectory t;
    t.goal = goal;
    Memory memory;

    for (;;) {
        if (memory.size() >= config.max_steps) {
            t.stop = StopReason::MaxSteps;
            break;
        }
        std::optional<Decision> d;
        try {
            d = policy.next(goal, memory);
        } catch (const Error& e) {
            t.stop = StopReason::PolicyFailure;
            t.policy_error = std::string(errc_name(e.code())) + ": " + e.what();
            break;
        } catch (const std::exception& e) {
            t.stop = StopReason::PolicyFailure;
            t.policy_error = e.what();
            break;
        }
        if (!d->is_call()) {
            t.answer = d->final_answer();
            t.stop = StopReason::FinalAnswer;
            break;
        }
        const ToolCall& call = d->tool_call();
        if (config.no_tool_mode) {
            t.stop = StopReason::PolicyFailure;
            t.policy_error = "MalformedModelOutput: tool call '" + call.name + "' in no-tool mode";
            break;
        }
        memory.append({call.name, call.args,
                       call_with_timeout(registry, call.name, call.args, ctx, config.tool_timeout)});
    }

    t.actions = memory.actions();
    t.usage = policy.usage();
    t.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return t;
}

} // namespace geoagent::agent
