// SPDX-License-Identifier: Apache-2.0
#include "geoagent/agent/policy.hpp"

namespace geoagent::agent {

json resolve_references(const json& j, const Memory& memory) {
    if (j.is_array()) {
        json out = json::array();
        for (const auto& e : j) out.push_back(resolve_references(e, memory));
        return out;
    }
    if (!j.is_object()) return j;
    if (j.contains("$from")) {
        const json& ref = j.at("$from");
        if (!ref.is_number_integer())
            throw Error(Errc::InvalidArgument, "'$from' must be an integer step index");
        long long k = ref.get<long long>();
        const auto n = static_cast<long long>(memory.size());
        if (k < 0) k += n;
        if (k < 0 || k >= n)
            throw Error(Errc::InvalidArgument, "reference to step " + ref.dump() +
                                                   " but only " + std::to_string(n) +
                                                   " steps ran");
        const json* value = &memory[static_cast<std::size_t>(k)].output.value;
        if (!j.contains("field")) return *value;
        const json& field = j.at("field");
        const json path = field.is_array() ? field : json::array({field});
        for (const auto& key : path) {
            if (key.is_string() && value->is_object() && value->contains(key.get<std::string>())) {
                value = &value->at(key.get<std::string>());
            } else if (key.is_number_integer() && value->is_array()) {
                long long i = key.get<long long>();
                const auto len = static_cast<long long>(value->size());
                if (i < 0) i += len;
                if (i < 0 || i >= len)
                    throw Error(Errc::InvalidArgument, "step " + std::to_string(k) + " has no element " +
                                                           key.dump());
                value = &value->at(static_cast<std::size_t>(i));
            } else {
                throw Error(Errc::InvalidArgument,
                            "step " + std::to_string(k) + " has no field " + key.dump());
            }
        }
        return *value;
    }
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = resolve_references(*it, memory);
    return out;
}

ScriptedPolicy::ScriptedPolicy(std::vector<PlanStep> plan, std::optional<FinalAnswer> answer)
    : plan_(std::move(plan)), answer_(std::move(answer)) {}

ScriptedPolicy ScriptedPolicy::replay(const Trajectory& t) {
    std::vector<PlanStep> plan;
    for (const Action& a : t.actions) plan.push_back({a.tool, a.input});
    return ScriptedPolicy(std::move(plan), t.answer);
}

ScriptedPolicy ScriptedPolicy::from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("steps") || !doc.at("steps").is_array())
        throw Error(Errc::SchemaError, "plan needs a 'steps' array");
    std::vector<PlanStep> plan;
    for (const auto& s : doc.at("steps")) {
        if (!s.is_object() || !s.contains("tool") || !s.at("tool").is_string())
            throw Error(Errc::SchemaError, "plan step needs a 'tool' name");
        json args = s.contains("input") ? s.at("input") : s.value("args", json::object());
        if (!args.is_object()) throw Error(Errc::SchemaError, "plan step input must be an object");
        plan.push_back({s.at("tool").get<std::string>(), std::move(args)});
    }
    // A plan names its answer in "final_answer"; ground truths carry a bare
    // "answer" value and trajectory records a "final" block.
    std::optional<FinalAnswer> answer;
    const auto take = [&](const json& f) {
        if (!f.is_object()) throw Error(Errc::SchemaError, "final answer must be an object");
        answer = FinalAnswer{f.value("text", std::string()), f.value("value", json())};
    };
    if (doc.contains("final_answer") && !doc.at("final_answer").is_null()) {
        take(doc.at("final_answer"));
    } else if (doc.contains("answer") && !doc.at("answer").is_null()) {
        answer = FinalAnswer{"", doc.at("answer")};
    } else if (doc.contains("final") && doc.at("final").is_object() &&
               doc.at("final").contains("answer") && !doc.at("final").at("answer").is_null()) {
        take(doc.at("final").at("answer"));
    }
    return ScriptedPolicy(std::move(plan), std::move(answer));
}

Decision ScriptedPolicy::next(const Goal&, const Memory& memory) {
    const std::size_t k = memory.size();
    if (k < plan_.size())
        return Decision::call(plan_[k].tool, resolve_references(plan_[k].args, memory));
    if (answer_) {
        json value = resolve_references(answer_->value, memory);
        std::string text = answer_->text;
        if (text.empty()) text = value.is_string() ? value.get<std::string>() : value.dump();
        return Decision::answer(std::move(text), std::move(value));
    }
    if (plan_.empty()) throw Error(Errc::MalformedModelOutput, "empty plan without an answer");
    const PlanStep& s = plan_[k % plan_.size()];
    return Decision::call(s.tool, resolve_references(s.args, memory));
}

} // namespace geoagent::agent
