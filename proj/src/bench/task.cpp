// SPDX-License-Identifier: Apache-2.0
#include "geoagent/bench/task.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace geoagent::bench {

namespace {

[[noreturn]] void schema(const std::string& msg) { throw Error(Errc::SchemaError, msg); }

const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) schema(where + ": missing '" + key + "'");
    return j.at(key);
}

std::string text_field(const json& j, const char* key, const std::string& where) {
    const json& v = field(j, key, where);
    if (!v.is_string()) schema(where + ": '" + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<std::string> root_forms(const std::vector<fs::path>& roots) {
    std::vector<std::string> out;
    for (const auto& r : roots) {
        if (r.empty()) continue;
        for (fs::path p : {r, fs::weakly_canonical(r)}) {
            std::string s = p.lexically_normal().generic_string();
            while (s.size() > 1 && s.back() == '/') s.pop_back();
            if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
        }
    }
    // longest first so nested roots win
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
    return out;
}

std::string strip_roots(std::string s, const std::vector<std::string>& roots) {
    for (const auto& r : roots) {
        const std::string prefix = r + "/";
        for (std::size_t at = s.find(prefix); at != std::string::npos; at = s.find(prefix, at))
            s.erase(at, prefix.size());
        if (s == r) s = ".";
    }
    return s;
}

json strip_all(const json& j, const std::vector<std::string>& roots) {
    if (j.is_string()) return strip_roots(j.get<std::string>(), roots);
    if (j.is_array()) {
        json out = json::array();
        for (const auto& e : j) out.push_back(strip_all(e, roots));
        return out;
    }
    if (j.is_object()) {
        json out = json::object();
        for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = strip_all(*it, roots);
        return out;
    }
    return j;
}

} // namespace

std::string_view modality_name(Modality m) noexcept {
    switch (m) {
    case Modality::Spectrum: return "Spectrum";
    case Modality::Products: return "Products";
    case Modality::RGB: return "RGB";
    }
    return "Spectrum";
}

std::optional<Modality> parse_modality(std::string_view s) noexcept {
    for (Modality m : {Modality::Spectrum, Modality::Products, Modality::RGB})
        if (modality_name(m) == s) return m;
    return std::nullopt;
}

json ground_truth_to_json(const eval::GroundTruth& gt) {
    json steps = json::array();
    for (const auto& s : gt.steps) steps.push_back({{"tool", s.tool}, {"input", s.input}, {"output", s.output}});
    return {{"steps", steps}, {"answer", gt.answer}};
}

eval::GroundTruth ground_truth_from_json(const json& j) {
    eval::GroundTruth gt;
    const json& steps = field(j, "steps", "ground_truth");
    if (!steps.is_array()) schema("ground_truth: 'steps' must be an array");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string where = "ground_truth.steps[" + std::to_string(i) + "]";
        eval::Step s;
        s.tool = text_field(steps[i], "tool", where);
        s.input = field(steps[i], "input", where);
        if (!s.input.is_object()) schema(where + ": 'input' must be an object");
        s.output = steps[i].value("output", json());
        gt.steps.push_back(std::move(s));
    }
    gt.answer = field(j, "answer", "ground_truth");
    return gt;
}

json TaskSpec::to_json() const {
    return {{"id", id},
            {"modality", modality_name(modality)},
            {"query_ap", query_ap},
            {"query_if", query_if},
            {"data_dir", data_dir},
            {"answer_rule", ground_truth.rule.to_json()},
            {"ground_truth", ground_truth_to_json(ground_truth)}};
}

TaskSpec TaskSpec::from_json(const json& j) {
    if (!j.is_object()) schema("task must be an object");
    TaskSpec t;
    t.id = text_field(j, "id", "task");
    const std::string where = "task '" + t.id + "'";
    const auto m = parse_modality(text_field(j, "modality", where));
    if (!m) schema(where + ": modality must be Spectrum, Products or RGB");
    t.modality = *m;
    t.query_ap = text_field(j, "query_ap", where);
    t.query_if = text_field(j, "query_if", where);
    if (t.id.empty() || t.query_ap.empty() || t.query_if.empty())
        schema(where + ": id and both queries must be non-empty");
    t.data_dir = text_field(j, "data_dir", where);
    t.ground_truth = ground_truth_from_json(field(j, "ground_truth", where));
    if (t.ground_truth.steps.empty()) schema(where + ": reference trajectory has no steps");
    t.ground_truth.rule = eval::AnswerRule::from_json(field(j, "answer_rule", where));
    return t;
}

TaskSpec load_task(const fs::path& file, const tools::Registry* registry) {
    TaskSpec t = TaskSpec::from_json(read_json_file(file));
    fs::path root(t.data_dir);
    if (root.is_relative()) root = file.parent_path() / root;
    std::error_code ec;
    if (!fs::is_directory(root, ec))
        throw Error(Errc::MissingDirectory, "task '" + t.id + "': data directory " + root.string() +
                                                " does not exist");
    t.data_root = fs::weakly_canonical(root);
    if (registry) {
        for (std::size_t i = 0; i < t.ground_truth.steps.size(); ++i)
            if (!registry->contains(t.ground_truth.steps[i].tool))
                schema("task '" + t.id + "': step " + std::to_string(i) + " uses unregistered tool '" +
                       t.ground_truth.steps[i].tool + "'");
    }
    return t;
}

std::vector<TaskSpec> load_tasks(const fs::path& dir, const tools::Registry* registry) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        throw Error(Errc::MissingDirectory, "task directory " + dir.string() + " does not exist");
    std::vector<TaskSpec> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(load_task(e.path(), registry));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

json Plan::to_json() const {
    json steps = json::array();
    for (const auto& s : this->steps) steps.push_back({{"tool", s.tool}, {"input", s.args}});
    return {{"steps", steps}, {"final_answer", {{"value", answer}}}, {"answer_rule", rule.to_json()}};
}

Plan Plan::from_json(const json& j) {
    const agent::ScriptedPolicy parsed = agent::ScriptedPolicy::from_json(j);
    Plan p;
    p.steps = parsed.plan();
    if (j.contains("final_answer") && j.at("final_answer").is_object() &&
        j.at("final_answer").contains("value"))
        p.answer = j.at("final_answer").at("value");
    if (j.contains("answer_rule")) p.rule = eval::AnswerRule::from_json(j.at("answer_rule"));
    return p;
}

json relativize(const json& j, const std::vector<fs::path>& roots) {
    return strip_all(j, root_forms(roots));
}

eval::GroundTruth annotate_from_plan(const Plan& plan, const tools::Registry& registry,
                                     const tools::ToolContext& ctx) {
    if (plan.steps.empty()) throw Error(Errc::EmptyInput, "plan has no steps");
    const std::vector<fs::path> roots{ctx.ws().root(), ctx.ws().data_root()};
    eval::GroundTruth gt;
    gt.rule = plan.rule;
    agent::Memory memory;
    for (std::size_t k = 0; k < plan.steps.size(); ++k) {
        const auto& step = plan.steps[k];
        json args;
        try {
            args = agent::resolve_references(step.args, memory);
        } catch (const Error& e) {
            throw Error(Errc::InvalidArgument, "step '" + step.tool + "': " + e.what(), k);
        }
        tools::ToolResult r = registry.call(step.tool, args, ctx);
        if (!r.ok) {
            const std::string cls = r.error_class ? std::string(tools::error_class_name(*r.error_class)) : "Error";
            throw Error(Errc::InvalidArgument, "step '" + step.tool + "' failed (" + cls + "): " + r.text, k);
        }
        gt.steps.push_back({step.tool, relativize(args, roots), relativize(r.to_json(), roots)});
        memory.append({step.tool, args, std::move(r)});
    }
    try {
        gt.answer = relativize(agent::resolve_references(plan.answer, memory), roots);
    } catch (const Error& e) {
        throw Error(Errc::InvalidArgument, std::string("answer: ") + e.what(), plan.steps.size());
    }
    if (gt.answer.is_null())
        throw Error(Errc::MissingAnswer, "plan answer resolved to null", plan.steps.size());
    return gt;
}

json read_json_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(Errc::MissingFile, "cannot read " + p.string());
    std::stringstream buf;
    buf << in.rdbuf();
    json j = json::parse(buf.str(), nullptr, false);
    if (j.is_discarded()) throw Error(Errc::SchemaError, p.string() + " is not valid JSON");
    return j;
}

void write_json_file(const fs::path& p, const json& j) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::WriteFailure, "cannot write " + p.string());
        out << j.dump(2) << '\n';
        if (!out) throw Error(Errc::WriteFailure, "cannot write " + p.string());
    }
    fs::rename(tmp, p);
}

} // namespace geoagent::bench
