// SPDX-License-Identifier: Apache-2.0
#include "geoagent/bench/record.hpp"

#include <ctime>

namespace geoagent::bench {

namespace {

[[noreturn]] void schema(const std::string& msg) { throw Error(Errc::SchemaError, "record: " + msg); }

const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) schema(where + " missing '" + key + "'");
    return j.at(key);
}

std::string need_str(const json& j, const char* key, const std::string& where) {
    const json& v = need(j, key, where);
    if (!v.is_string()) schema(where + "." + key + " must be a string");
    return v.get<std::string>();
}

long long need_int(const json& j, const char* key, const std::string& where) {
    const json& v = need(j, key, where);
    if (!v.is_number_integer()) schema(where + "." + key + " must be an integer");
    return v.get<long long>();
}

} // namespace

json TrajectoryRecord::to_json() const {
    const auto& t = trajectory;
    json steps = json::array();
    for (const auto& a : t.actions)
        steps.push_back({{"tool", a.tool}, {"input", a.input}, {"output", a.output.to_json()}});
    json answer = nullptr;
    if (t.answer) answer = {{"text", t.answer->text}, {"value", t.answer->value}};
    return {{"task_id", task_id},
            {"steps", steps},
            {"final",
             {{"answer", answer},
              {"stop_reason", agent::stop_reason_name(t.stop)},
              {"policy_error", t.policy_error}}},
            {"metadata",
             {{"model", model},
              {"regime", agent::regime_name(t.goal.regime)},
              {"query", t.goal.query},
              {"data_dir", t.goal.data_dir},
              {"started_at", started_at},
              {"finished_at", finished_at},
              {"wall_seconds", t.wall_seconds},
              {"usage",
               {{"prompt_tokens", t.usage.prompt_tokens},
                {"completion_tokens", t.usage.completion_tokens},
                {"requests", t.usage.requests}}}}}};
}

TrajectoryRecord TrajectoryRecord::from_json(const json& j) {
    if (!j.is_object()) schema("must be an object");
    TrajectoryRecord r;
    r.task_id = need_str(j, "task_id", "record");
    auto& t = r.trajectory;

    const json& steps = need(j, "steps", "record");
    if (!steps.is_array()) schema("steps must be an array");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string where = "steps[" + std::to_string(i) + "]";
        agent::Action a;
        a.tool = need_str(steps[i], "tool", where);
        a.input = need(steps[i], "input", where);
        if (!a.input.is_object()) schema(where + ".input must be an object");
        a.output = tools::ToolResult::from_json(need(steps[i], "output", where));
        t.actions.push_back(std::move(a));
    }

    const json& fin = need(j, "final", "record");
    const json& answer = need(fin, "answer", "final");
    if (!answer.is_null()) {
        if (!answer.is_object()) schema("final.answer must be an object or null");
        t.answer = agent::FinalAnswer{need_str(answer, "text", "final.answer"), answer.value("value", json())};
    }
    const auto stop = agent::parse_stop_reason(need_str(fin, "stop_reason", "final"));
    if (!stop) schema("final.stop_reason is not a known stop reason");
    t.stop = *stop;
    t.policy_error = need_str(fin, "policy_error", "final");
    if ((t.stop == agent::StopReason::FinalAnswer) != t.answer.has_value())
        schema("final.answer must be present exactly when stop_reason is final_answer");

    const json& meta = need(j, "metadata", "record");
    r.model = need_str(meta, "model", "metadata");
    const auto regime = agent::parse_regime(need_str(meta, "regime", "metadata"));
    if (!regime) schema("metadata.regime must be 'ap' or 'if'");
    t.goal.regime = *regime;
    t.goal.query = need_str(meta, "query", "metadata");
    t.goal.data_dir = need_str(meta, "data_dir", "metadata");
    r.started_at = need_str(meta, "started_at", "metadata");
    r.finished_at = need_str(meta, "finished_at", "metadata");
    const json& wall = need(meta, "wall_seconds", "metadata");
    if (!wall.is_number() || wall.get<double>() < 0) schema("metadata.wall_seconds must be a non-negative number");
    t.wall_seconds = wall.get<double>();
    const json& usage = need(meta, "usage", "metadata");
    t.usage.prompt_tokens = need_int(usage, "prompt_tokens", "metadata.usage");
    t.usage.completion_tokens = need_int(usage, "completion_tokens", "metadata.usage");
    t.usage.requests = need_int(usage, "requests", "metadata.usage");
    return r;
}

void validate_record(const json& j) { (void)TrajectoryRecord::from_json(j); }

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace geoagent::bench
