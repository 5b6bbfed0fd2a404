// SPDX-License-Identifier: Apache-2.0
#include "geoagent/eval/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <set>
#include <unordered_set>

namespace geoagent::eval {

namespace fs = std::filesystem;

namespace {

void require_reference(std::size_t m) {
    if (m == 0) throw Error(Errc::EmptyInput, "reference trajectory has no steps");
}

std::string as_text(const json& j) {
    return j.is_string() ? j.get<std::string>() : j.dump();
}

std::optional<double> as_number(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const json v = agent::parse_answer_value("Final answer: " + j.get<std::string>());
        if (v.is_number()) return v.get<double>();
    }
    return std::nullopt;
}

std::set<std::string> as_string_set(const json& j) {
    std::set<std::string> out;
    if (j.is_array()) {
        for (const auto& e : j) out.insert(normalize_text(as_text(e)));
        return out;
    }
    const std::string s = as_text(j);
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t end = s.find_first_of(",;", start);
        const std::string part = normalize_text(s.substr(start, end - start));
        if (!part.empty()) out.insert(part);
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return out;
}

} // namespace

std::string_view rule_kind_name(AnswerRule::Kind k) noexcept {
    switch (k) {
    case AnswerRule::Kind::Numeric: return "numeric";
    case AnswerRule::Kind::StringNormalized: return "string";
    case AnswerRule::Kind::StringSet: return "set";
    case AnswerRule::Kind::StructuredEqual: return "structured";
    }
    return "numeric";
}

json AnswerRule::to_json() const {
    json j = {{"kind", rule_kind_name(kind)}};
    if (kind == Kind::Numeric || kind == Kind::StructuredEqual) {
        j["rel_tol"] = rel_tol;
        j["abs_tol"] = abs_tol;
    }
    return j;
}

AnswerRule AnswerRule::from_json(const json& j) {
    AnswerRule r;
    const json& kind = j.is_object() ? j.value("kind", json()) : j;
    if (!kind.is_string()) throw Error(Errc::SchemaError, "answer rule needs a kind");
    bool found = false;
    for (auto k : {Kind::Numeric, Kind::StringNormalized, Kind::StringSet, Kind::StructuredEqual}) {
        if (rule_kind_name(k) == kind.get<std::string>()) {
            r.kind = k;
            found = true;
        }
    }
    if (!found) throw Error(Errc::SchemaError, "unknown answer rule '" + kind.get<std::string>() + "'");
    if (j.is_object()) {
        r.rel_tol = j.value("rel_tol", r.rel_tol);
        r.abs_tol = j.value("abs_tol", r.abs_tol);
    }
    if (!(r.rel_tol >= 0) || !(r.abs_tol >= 0))
        throw Error(Errc::SchemaError, "answer rule tolerances must be non-negative");
    return r;
}

std::string normalize_text(std::string_view s) {
    std::string out;
    bool space = false;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            space = !out.empty();
            continue;
        }
        if (space) out.push_back(' ');
        space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

AccuracyResult accuracy(const json& answer, const json& reference, const AnswerRule& rule) {
    if (answer.is_null()) return {0, "MissingAnswer: no final answer"};
    switch (rule.kind) {
    case AnswerRule::Kind::Numeric: {
        const auto want = as_number(reference);
        if (!want) return {0, "reference is not a number"};
        const auto got = as_number(answer);
        if (!got || !std::isfinite(*got)) return {0, "answer is not a number: " + as_text(answer)};
        const double tol = std::max(rule.abs_tol, rule.rel_tol * std::fabs(*want));
        if (std::fabs(*got - *want) <= tol) return {1, ""};
        return {0, "off by " + std::to_string(std::fabs(*got - *want)) + " (tolerance " +
                       std::to_string(tol) + ")"};
    }
    case AnswerRule::Kind::StringNormalized:
        if (normalize_text(as_text(answer)) == normalize_text(as_text(reference))) return {1, ""};
        return {0, "text differs"};
    case AnswerRule::Kind::StringSet:
        if (as_string_set(answer) == as_string_set(reference)) return {1, ""};
        return {0, "sets differ"};
    case AnswerRule::Kind::StructuredEqual:
        if (arguments_equal(answer, reference, {{}, rule.abs_tol})) return {1, ""};
        return {0, "structures differ"};
    }
    return {0, "unknown rule"};
}

double efficiency(std::size_t pred_steps, std::size_t ref_steps) {
    require_reference(ref_steps);
    return static_cast<double>(pred_steps) / static_cast<double>(ref_steps);
}

double tools_any_order(const std::vector<std::string>& pred, const std::vector<std::string>& ref) {
    require_reference(ref.size());
    const std::unordered_set<std::string> have(pred.begin(), pred.end());
    const std::set<std::string> want(ref.begin(), ref.end());
    std::size_t hit = 0;
    for (const auto& t : want) hit += have.count(t);
    return static_cast<double>(hit) / static_cast<double>(want.size());
}

double tools_in_order(const std::vector<std::string>& pred, const std::vector<std::string>& ref) {
    require_reference(ref.size());
    // Each reference tool takes the earliest remaining match; see
    // docs/tools_in_order.md for why this finds the longest prefix.
    std::size_t k = 0;
    for (const auto& t : pred) {
        if (k < ref.size() && t == ref[k]) ++k;
    }
    return static_cast<double>(k) / static_cast<double>(ref.size());
}

double tool_exact_match(const std::vector<std::string>& pred, const std::vector<std::string>& ref) {
    require_reference(ref.size());
    std::size_t k = 0;
    while (k < pred.size() && k < ref.size() && pred[k] == ref[k]) ++k;
    return static_cast<double>(k) / static_cast<double>(ref.size());
}

std::string normalize_path_arg(std::string_view s, const std::vector<std::string>& roots) {
    if (s.find('/') == std::string_view::npos && s.find('\\') == std::string_view::npos)
        return std::string(s);
    std::string p(s);
    std::replace(p.begin(), p.end(), '\\', '/');

    std::vector<std::string> rs;
    for (std::string r : roots) {
        std::replace(r.begin(), r.end(), '\\', '/');
        r = fs::path(r).lexically_normal().generic_string();
        while (r.size() > 1 && r.back() == '/') r.pop_back();
        if (!r.empty()) rs.push_back(std::move(r));
    }
    std::sort(rs.begin(), rs.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });

    p = fs::path(p).lexically_normal().generic_string();
    for (const auto& r : rs) {
        if (p == r) {
            p = ".";
            break;
        }
        if (p.size() > r.size() && p.compare(0, r.size(), r) == 0 &&
            (p[r.size()] == '/' || r.back() == '/')) {
            p = p.substr(r.size() + (r.back() == '/' ? 0 : 1));
            break;
        }
    }
    while (p.rfind("./", 0) == 0) p.erase(0, 2);
    while (p.size() > 1 && p.back() == '/') p.pop_back();
    return p.empty() ? "." : p;
}

bool arguments_equal(const json& a, const json& b, const ParamOptions& opts) {
    if (a.is_number() && b.is_number())
        return std::fabs(a.get<double>() - b.get<double>()) <= opts.numeric_tol;
    if (a.is_string() && b.is_string())
        return normalize_path_arg(a.get<std::string>(), opts.roots) ==
               normalize_path_arg(b.get<std::string>(), opts.roots);
    if (a.is_array() && b.is_array()) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!arguments_equal(a[i], b[i], opts)) return false;
        return true;
    }
    if (a.is_object() && b.is_object()) {
        if (a.size() != b.size()) return false;
        for (auto it = a.begin(); it != a.end(); ++it) {
            const auto other = b.find(it.key());
            if (other == b.end() || !arguments_equal(*it, *other, opts)) return false;
        }
        return true;
    }
    return a == b;
}

double parameter_accuracy(const std::vector<Step>& pred, const std::vector<Step>& ref,
                          const ParamOptions& opts) {
    require_reference(ref.size());
    std::size_t k = 0;
    while (k < pred.size() && k < ref.size() && pred[k].tool == ref[k].tool &&
           arguments_equal(pred[k].input, ref[k].input, opts))
        ++k;
    return static_cast<double>(k) / static_cast<double>(ref.size());
}

// ---- taxonomy --------------------------------------------------------------

std::string_view failure_name(Failure f) noexcept {
    switch (f) {
    case Failure::UnawareOfTermination: return "UnawareOfTermination";
    case Failure::ToolHallucination: return "ToolHallucination";
    case Failure::FileHallucination: return "FileHallucination";
    case Failure::InvalidParameters: return "InvalidParameters";
    case Failure::SystemError: return "SystemError";
    }
    return "SystemError";
}

std::size_t Histogram::total() const noexcept {
    std::size_t n = 0;
    for (auto c : counts) n += c;
    return n;
}

Histogram& Histogram::operator+=(const Histogram& o) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    return *this;
}

json Histogram::to_json() const {
    json j = json::object();
    for (Failure f : kAllFailures) j[std::string(failure_name(f))] = (*this)[f];
    return j;
}

Histogram Histogram::from_json(const json& j) {
    if (!j.is_object()) throw Error(Errc::SchemaError, "error histogram must be an object");
    Histogram h;
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (Failure f : kAllFailures) {
            if (failure_name(f) == it.key()) {
                if (!it->is_number_unsigned())
                    throw Error(Errc::SchemaError, "count for '" + it.key() + "' must be a non-negative integer");
                h[f] = it->get<std::size_t>();
                known = true;
            }
        }
        if (!known) throw Error(Errc::SchemaError, "unknown error class '" + it.key() + "'");
    }
    return h;
}

Histogram classify_errors(const agent::Trajectory& t, const tools::Registry* registry) {
    Histogram h;
    for (const agent::Action& a : t.actions) {
        if (a.output.ok) continue;
        if (a.output.error_class) {
            switch (*a.output.error_class) {
            case tools::ErrorClass::ToolHallucination: ++h[Failure::ToolHallucination]; break;
            case tools::ErrorClass::FileHallucination: ++h[Failure::FileHallucination]; break;
            case tools::ErrorClass::InvalidParameters: ++h[Failure::InvalidParameters]; break;
            case tools::ErrorClass::SystemError: ++h[Failure::SystemError]; break;
            }
        } else if (registry && !registry->contains(a.tool)) {
            ++h[Failure::ToolHallucination];
        } else {
            ++h[Failure::SystemError];
        }
    }
    if (t.unaware_of_termination()) ++h[Failure::UnawareOfTermination];
    return h;
}

// ---- per task --------------------------------------------------------------

std::vector<std::string> tool_names(const std::vector<agent::Action>& actions) {
    std::vector<std::string> out;
    out.reserve(actions.size());
    for (const auto& a : actions) out.push_back(a.tool);
    return out;
}

std::vector<std::string> tool_names(const std::vector<Step>& steps) {
    std::vector<std::string> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.tool);
    return out;
}

std::vector<Step> to_steps(const std::vector<agent::Action>& actions) {
    std::vector<Step> out;
    out.reserve(actions.size());
    for (const auto& a : actions) out.push_back({a.tool, a.input, a.output.to_json()});
    return out;
}

json TaskReport::to_json() const {
    return {{"task_id", task_id},
            {"modality", modality},
            {"regime", regime},
            {"model", model},
            {"accuracy", scores.accuracy},
            {"efficiency", scores.efficiency},
            {"tao", scores.tao},
            {"tio", scores.tio},
            {"tem", scores.tem},
            {"param_acc", scores.param},
            {"accuracy_reason", accuracy_reason},
            {"stop_reason", stop_reason},
            {"steps", steps},
            {"errors", errors.to_json()}};
}

TaskReport TaskReport::from_json(const json& j) {
    try {
        TaskReport r;
        r.task_id = j.at("task_id").get<std::string>();
        r.modality = j.at("modality").get<std::string>();
        r.regime = j.at("regime").get<std::string>();
        r.model = j.at("model").get<std::string>();
        r.scores = {j.at("accuracy").get<double>(), j.at("efficiency").get<double>(),
                    j.at("tao").get<double>(),      j.at("tio").get<double>(),
                    j.at("tem").get<double>(),      j.at("param_acc").get<double>()};
        r.accuracy_reason = j.value("accuracy_reason", std::string());
        r.stop_reason = j.at("stop_reason").get<std::string>();
        r.steps = j.at("steps").get<std::size_t>();
        r.errors = Histogram::from_json(j.at("errors"));
        return r;
    } catch (const json::exception& e) {
        throw Error(Errc::SchemaError, std::string("task report: ") + e.what());
    }
}

TaskReport score_task(const agent::Trajectory& pred, const GroundTruth& gt,
                      const ParamOptions& opts, const tools::Registry* registry) {
    require_reference(gt.steps.size());
    TaskReport r;
    r.regime = std::string(agent::regime_name(pred.goal.regime));
    r.stop_reason = std::string(agent::stop_reason_name(pred.stop));
    r.steps = pred.actions.size();

    json answer;
    if (pred.answer) {
        answer = pred.answer->value;
        if (answer.is_null() && !pred.answer->text.empty())
            answer = gt.rule.kind == AnswerRule::Kind::StringNormalized
                         ? json(pred.answer->text)
                         : agent::parse_answer_value(pred.answer->text);
    }
    const AccuracyResult acc = accuracy(answer, gt.answer, gt.rule);
    r.scores.accuracy = acc.score;
    r.accuracy_reason = acc.reason;

    const auto names = tool_names(pred.actions);
    const auto ref = tool_names(gt.steps);
    r.scores.efficiency = efficiency(names.size(), ref.size());
    r.scores.tao = tools_any_order(names, ref);
    r.scores.tio = tools_in_order(names, ref);
    r.scores.tem = tool_exact_match(names, ref);
    r.scores.param = parameter_accuracy(to_steps(pred.actions), gt.steps, opts);
    r.errors = classify_errors(pred, registry);
    return r;
}

} // namespace geoagent::eval
