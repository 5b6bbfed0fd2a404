// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geoagent/tools/registry.hpp"

namespace geoagent::agent {

using tools::json;

/// Auto-planning queries leave the steps implicit; instruction-following
/// queries spell them out.
enum class Regime { AutoPlanning, InstructionFollowing };

/// "ap" / "if".
std::string_view regime_name(Regime r) noexcept;
std::optional<Regime> parse_regime(std::string_view s) noexcept;

enum class StopReason { FinalAnswer, MaxSteps, PolicyFailure };

/// "final_answer" / "max_steps" / "policy_failure".
std::string_view stop_reason_name(StopReason s) noexcept;
std::optional<StopReason> parse_stop_reason(std::string_view s) noexcept;

struct Goal {
    std::string query;
    Regime regime = Regime::AutoPlanning;
    std::string data_dir;

    friend bool operator==(const Goal&, const Goal&) = default;
};

/// One executed step: tool name, arguments as sent, and the full result.
struct Action {
    std::string tool;
    json input = json::object();
    tools::ToolResult output;

    friend bool operator==(const Action&, const Action&) = default;
};

struct FinalAnswer {
    std::string text;
    json value;  ///< parsed number, string or structure; null when absent

    friend bool operator==(const FinalAnswer&, const FinalAnswer&) = default;
};

/// Append-only record of executed steps. The goal context is the first
/// observation and is rendered from the Goal itself.
class Memory {
public:
    void append(Action a) { actions_.push_back(std::move(a)); }
    const std::vector<Action>& actions() const noexcept { return actions_; }
    std::size_t size() const noexcept { return actions_.size(); }
    bool empty() const noexcept { return actions_.empty(); }
    const Action& operator[](std::size_t i) const { return actions_[i]; }

private:
    std::vector<Action> actions_;
};

struct Usage {
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
    long long requests = 0;

    friend bool operator==(const Usage&, const Usage&) = default;
};

struct Trajectory {
    Goal goal;
    std::vector<Action> actions;
    std::optional<FinalAnswer> answer;
    StopReason stop = StopReason::FinalAnswer;
    std::string policy_error;  ///< set when stop == PolicyFailure
    double wall_seconds = 0.0;
    Usage usage;

    /// Episodes cut off by the step limit count as unaware of termination.
    bool unaware_of_termination() const noexcept { return stop == StopReason::MaxSteps; }
    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct EpisodeConfig {
    std::size_t max_steps = 25;
    /// Per tool call; zero disables. A call that overruns is reported as a
    /// SystemError and left to finish on a detached thread, so the registry
    /// and workspace must outlive the episode in that case.
    std::chrono::milliseconds tool_timeout{0};
    /// Ablation mode: any tool call from the policy ends the episode.
    bool no_tool_mode = false;
    /// Byte budget per observation in rendered transcripts.
    std::size_t observation_budget = 8192;
};

struct ToolCall {
    std::string name;
    json args = json::object();
};

/// What a policy proposes next: a tool call or the final answer.
struct Decision {
    std::variant<ToolCall, FinalAnswer> choice;

    static Decision call(std::string name, json args) {
        return {ToolCall{std::move(name), std::move(args)}};
    }
    static Decision answer(std::string text, json value = nullptr) {
        return {FinalAnswer{std::move(text), std::move(value)}};
    }
    bool is_call() const noexcept { return std::holds_alternative<ToolCall>(choice); }
    const ToolCall& tool_call() const { return std::get<ToolCall>(choice); }
    const FinalAnswer& final_answer() const { return std::get<FinalAnswer>(choice); }
};

class Policy {
public:
    virtual ~Policy() = default;
    /// Throws Error; any throw ends the episode with PolicyFailure.
    virtual Decision next(const Goal& goal, const Memory& memory) = 0;
    virtual Usage usage() const { return {}; }
};

/// Runs the think/act loop until a final answer, the step limit, or a
/// policy failure. Tool errors are recorded as observations and never stop
/// the loop. Throws Error{InvalidArgument} when max_steps is zero.
Trajectory run_episode(const Goal& goal, Policy& policy, const tools::Registry& registry,
                       const tools::ToolContext& ctx, const EpisodeConfig& config = {});

/// Registry call bounded by `timeout` (zero = unbounded).
tools::ToolResult call_with_timeout(const tools::Registry& registry, const std::string& name,
                                    const json& args, const tools::ToolContext& ctx,
                                    std::chrono::milliseconds timeout);

// ---- transcript rendering -------------------------------------------------

struct RenderOptions {
    std::string system_prompt;  ///< empty = default_system_prompt()
    std::size_t observation_budget = 8192;
    bool no_tool_mode = false;
};

std::string default_system_prompt(const Goal& goal, bool no_tool_mode);

/// Chat transcript: system, user goal, then one assistant tool-call message
/// and one tool message per step.
json render_memory(const Goal& goal, const Memory& memory, const RenderOptions& opts = {});

/// Text the policy sees for one result; errors carry their class.
std::string observation_text(const tools::ToolResult& r);

/// Cuts `s` to at most `budget` bytes (at least 64), ending with a
/// "[truncated: showed X of Y bytes]" marker when anything was dropped.
/// The cut never splits a UTF-8 sequence.
std::string truncate_observation(const std::string& s, std::size_t budget);

/// Parses free text into an answer value: whatever follows a
/// "Final answer:" marker (as a number when it is one), otherwise the last
/// number in the text, otherwise null.
json parse_answer_value(const std::string& text);

} // namespace geoagent::agent
