// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <regex>

#include "geoagent/agent/episode.hpp"

namespace geoagent::agent {

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

// Number at the start of `s`: its length, or 0.
std::size_t leading_number(const std::string& s, double& out) {
    if (s.empty()) return 0;
    const char* begin = s.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return 0;
    // strtod also accepts "inf", "nan" and hex; insist on a decimal literal
    const char c = s[0];
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.')) return 0;
    return static_cast<std::size_t>(end - begin);
}

} // namespace

std::string default_system_prompt(const Goal& goal, bool no_tool_mode) {
    std::string p =
        "You are an Earth observation analyst. Answer the user's question about the "
        "satellite data in the data directory.\n";
    if (no_tool_mode) {
        p += "No tools are available. Reason from the question alone.\n";
    } else {
        p +=
            "Work step by step: call one tool at a time and read its result before "
            "deciding the next call.\n"
            "Input paths are relative to the data directory. Output paths are relative "
            "to your workspace and must not leave it.\n"
            "Tool errors are reported back to you; fix the call and continue.\n";
    }
    p += "When you are done, reply without a tool call and end with a line of the form "
         "'Final answer: <value>'.\n";
    if (!goal.data_dir.empty()) p += "Data directory: " + goal.data_dir + "\n";
    return p;
}

std::string observation_text(const tools::ToolResult& r) {
    if (!r.ok) {
        const std::string cls =
            r.error_class ? std::string(tools::error_class_name(*r.error_class)) : "Error";
        return "Error [" + cls + "]: " + r.text;
    }
    if (!r.text.empty()) return r.text;
    return r.value.is_null() ? std::string() : r.value.dump();
}

std::string truncate_observation(const std::string& s, std::size_t budget) {
    budget = std::max<std::size_t>(budget, 64);
    if (s.size() <= budget) return s;
    const auto marker = [&](std::size_t kept) {
        return "\n[truncated: showed " + std::to_string(kept) + " of " +
               std::to_string(s.size()) + " bytes]";
    };
    std::size_t keep = budget - marker(budget).size();
    while (keep > 0 && (static_cast<unsigned char>(s[keep]) & 0xC0) == 0x80) --keep;
    return s.substr(0, keep) + marker(keep);
}

json render_memory(const Goal& goal, const Memory& memory, const RenderOptions& opts) {
    json msgs = json::array();
    msgs.push_back({{"role", "system"},
                    {"content", opts.system_prompt.empty()
                                    ? default_system_prompt(goal, opts.no_tool_mode)
                                    : opts.system_prompt}});
    msgs.push_back({{"role", "user"}, {"content", goal.query}});
    for (std::size_t k = 0; k < memory.size(); ++k) {
        const Action& a = memory[k];
        const std::string id = "call_" + std::to_string(k);
        msgs.push_back({{"role", "assistant"},
                        {"content", nullptr},
                        {"tool_calls",
                         json::array({{{"id", id},
                                       {"type", "function"},
                                       {"function",
                                        {{"name", a.tool}, {"arguments", a.input.dump()}}}}})}});
        msgs.push_back({{"role", "tool"},
                        {"tool_call_id", id},
                        {"content", truncate_observation(observation_text(a.output),
                                                         opts.observation_budget)}});
    }
    return msgs;
}

json parse_answer_value(const std::string& text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const auto at = lower.rfind("final answer");
    if (at != std::string::npos) {
        std::string rest = text.substr(at + 12);
        rest = trim(rest);
        if (!rest.empty() && rest[0] == ':') rest = trim(rest.substr(1));
        while (!rest.empty() && (rest.back() == '.' || rest.back() == '*' || rest.back() == '`'))
            rest.pop_back();
        while (!rest.empty() && (rest.front() == '*' || rest.front() == '`')) rest.erase(0, 1);
        rest = trim(rest);
        if (rest.empty()) return nullptr;
        if (rest.front() == '[' || rest.front() == '{') {
            json j = json::parse(rest, nullptr, false);
            if (!j.is_discarded()) return j;
        }
        double v = 0;
        const std::size_t n = leading_number(rest, v);
        // a trailing unit ("K", "%") is fine; more digits mean free text
        if (n > 0 && std::none_of(rest.begin() + static_cast<std::ptrdiff_t>(n), rest.end(),
                                  [](unsigned char c) { return std::isdigit(c); }))
            return v;
        return rest;
    }
    static const std::regex number(R"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)");
    json last = nullptr;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), number);
         it != std::sregex_iterator(); ++it)
        last = std::strtod(it->str().c_str(), nullptr);
    return last;
}

} // namespace geoagent::agent
