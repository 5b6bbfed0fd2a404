// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "geoagent/agent/episode.hpp"

namespace geoagent::agent {

struct PlanStep {
    std::string tool;
    json args = json::object();
};

/// Replays a fixed plan. Step k of the episode is plan[k]; once the plan is
/// exhausted the policy answers. Without an answer the plan repeats, which
/// runs the episode into its step limit.
///
/// Arguments and the answer value may contain references of the form
/// {"$from": k} or {"$from": k, "field": f}, replaced by the value of
/// executed step k (negative k counts from the latest step). `f` is a key,
/// an array index, or a list of them walked in turn. This keeps the
/// decision a pure function of the memory.
class ScriptedPolicy : public Policy {
public:
    ScriptedPolicy(std::vector<PlanStep> plan, std::optional<FinalAnswer> answer);

    /// Plan and answer taken from a recorded trajectory.
    static ScriptedPolicy replay(const Trajectory& t);
    /// {"steps": [{"tool", "input"|"args"}...], "final_answer"?: {"text"?, "value"?}}.
    /// A bare "answer" value or a record's "final": {"answer"} also work, so
    /// ground truths and recorded trajectories replay as plans.
    static ScriptedPolicy from_json(const json& plan);

    Decision next(const Goal& goal, const Memory& memory) override;

    const std::vector<PlanStep>& plan() const noexcept { return plan_; }

private:
    std::vector<PlanStep> plan_;
    std::optional<FinalAnswer> answer_;
};

/// Replaces {"$from": k[, "field": f]} nodes in `j` with step values.
/// Throws Error{InvalidArgument} for a step that does not exist yet.
json resolve_references(const json& j, const Memory& memory);

struct LlmConfig {
    std::string endpoint;  ///< base URL; requests go to {endpoint}/chat/completions
    std::string api_key;
    std::string model;
    std::string system_prompt;  ///< empty = default_system_prompt()
    std::chrono::milliseconds timeout{120000};
    int retries = 2;  ///< extra attempts after an unreachable endpoint
    double temperature = 0.0;
    std::size_t observation_budget = 8192;
    bool no_tool_mode = false;

    /// LLM_ENDPOINT, LLM_API_KEY, LLM_MODEL; nullopt when no endpoint is set.
    static std::optional<LlmConfig> from_env();
};

/// Chat-completions backend with function calling.
class LlmPolicy : public Policy {
public:
    LlmPolicy(const tools::Registry& registry, LlmConfig config);

    /// One reprompt with the parse error after a malformed reply, then
    /// Error{MalformedModelOutput}. Error{PolicyUnreachable} once retries
    /// are spent.
    Decision next(const Goal& goal, const Memory& memory) override;
    Usage usage() const override { return usage_; }

    /// Request body for the current state; `feedback` is the extra
    /// assistant/user exchange of a reprompt.
    json build_request(const Goal& goal, const Memory& memory,
                       const json& feedback = json::array()) const;
    /// Maps a completion reply onto a decision. Throws
    /// Error{MalformedModelOutput}.
    static Decision parse_reply(const json& reply, bool no_tool_mode);

private:
    json post(const json& body);

    const tools::Registry& registry_;
    LlmConfig config_;
    json tool_schemas_;
    Usage usage_;
};

} // namespace geoagent::agent
