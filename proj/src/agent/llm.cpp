// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>

#include "geoagent/agent/policy.hpp"
#include "geoagent/net/http.hpp"

namespace geoagent::agent {

namespace {

std::string env(const char* name) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string();
}

[[noreturn]] void malformed(const std::string& msg) {
    throw Error(Errc::MalformedModelOutput, msg);
}

} // namespace

std::optional<LlmConfig> LlmConfig::from_env() {
    LlmConfig c;
    c.endpoint = env("LLM_ENDPOINT");
    if (c.endpoint.empty()) return std::nullopt;
    c.api_key = env("LLM_API_KEY");
    c.model = env("LLM_MODEL");
    return c;
}

LlmPolicy::LlmPolicy(const tools::Registry& registry, LlmConfig config)
    : registry_(registry), config_(std::move(config)), tool_schemas_(json::array()) {
    for (const tools::ToolSpec* spec : registry_.list())
        tool_schemas_.push_back({{"type", "function"},
                                 {"function",
                                  {{"name", spec->name},
                                   {"description", spec->description},
                                   {"parameters", spec->input_schema()}}}});
}

json LlmPolicy::build_request(const Goal& goal, const Memory& memory, const json& feedback) const {
    json messages = render_memory(
        goal, memory, {config_.system_prompt, config_.observation_budget, config_.no_tool_mode});
    for (const auto& m : feedback) messages.push_back(m);
    json body = {{"model", config_.model},
                 {"messages", std::move(messages)},
                 {"temperature", config_.temperature}};
    if (!config_.no_tool_mode) {
        body["tools"] = tool_schemas_;
        body["tool_choice"] = "auto";
    }
    return body;
}

Decision LlmPolicy::parse_reply(const json& reply, bool no_tool_mode) {
    if (!reply.is_object() || !reply.contains("choices") || !reply.at("choices").is_array() ||
        reply.at("choices").empty())
        malformed("reply has no choices");
    const json& choice = reply.at("choices").at(0);
    if (!choice.is_object() || !choice.contains("message") || !choice.at("message").is_object())
        malformed("reply choice has no message");
    const json& msg = choice.at("message");

    const json calls = msg.value("tool_calls", json());
    if (calls.is_array() && !calls.empty()) {
        if (no_tool_mode) malformed("tool call in no-tool mode");
        const json& fn = calls.at(0).value("function", json());
        if (!fn.is_object() || !fn.contains("name") || !fn.at("name").is_string())
            malformed("tool call has no function name");
        json args = json::object();
        if (fn.contains("arguments")) {
            const json& raw = fn.at("arguments");
            if (raw.is_string()) {
                const std::string s = raw.get<std::string>();
                if (!s.empty()) {
                    args = json::parse(s, nullptr, false);
                    if (args.is_discarded()) malformed("tool call arguments are not valid JSON");
                }
            } else {
                args = raw;
            }
        }
        if (!args.is_object()) malformed("tool call arguments must be a JSON object");
        return Decision::call(fn.at("name").get<std::string>(), std::move(args));
    }

    const json& content = msg.value("content", json());
    if (content.is_string() && !content.get<std::string>().empty()) {
        const std::string text = content.get<std::string>();
        return Decision::answer(text, parse_answer_value(text));
    }
    malformed("reply has neither a tool call nor text");
}

json LlmPolicy::post(const json& body) {
    net::HttpOptions opts;
    opts.timeout = config_.timeout;
    if (!config_.api_key.empty()) opts.headers["Authorization"] = "Bearer " + config_.api_key;
    std::string last;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        try {
            json reply = net::post_json(config_.endpoint, "/chat/completions", body, opts);
            ++usage_.requests;
            if (reply.is_object() && reply.contains("usage") && reply.at("usage").is_object()) {
                const json& u = reply.at("usage");
                usage_.prompt_tokens += u.value("prompt_tokens", 0LL);
                usage_.completion_tokens += u.value("completion_tokens", 0LL);
            }
            return reply;
        } catch (const Error& e) {
            if (e.code() != Errc::EndpointUnreachable) throw;
            last = e.what();
        }
    }
    throw Error(Errc::PolicyUnreachable, "after " + std::to_string(config_.retries + 1) +
                                             " attempts: " + last);
}

Decision LlmPolicy::next(const Goal& goal, const Memory& memory) {
    const json reply = post(build_request(goal, memory));
    try {
        return parse_reply(reply, config_.no_tool_mode);
    } catch (const Error& e) {
        if (e.code() != Errc::MalformedModelOutput) throw;
        std::string said;
        try {
            const json& c = reply.at("choices").at(0).at("message").at("content");
            if (c.is_string()) said = c.get<std::string>();
        } catch (const json::exception&) {
        }
        const json feedback = json::array(
            {{{"role", "assistant"}, {"content", said}},
             {{"role", "user"},
              {"content", std::string("Your previous reply could not be used: ") + e.what() +
                              ". Reply with exactly one tool call, or with text ending in "
                              "'Final answer: <value>'."}}});
        return parse_reply(post(build_request(goal, memory, feedback)), config_.no_tool_mode);
    }
}

} // namespace geoagent::agent
