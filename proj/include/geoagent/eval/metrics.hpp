// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoagent/agent/episode.hpp"

namespace geoagent::eval {

using tools::json;

/// How a final answer is compared with the reference.
struct AnswerRule {
    enum class Kind { Numeric, StringNormalized, StringSet, StructuredEqual };
    Kind kind = Kind::Numeric;
    double rel_tol = 1e-2;
    double abs_tol = 1e-6;

    json to_json() const;
    /// "numeric" | "string" | "set" | "structured", or an object
    /// {"kind", "rel_tol"?, "abs_tol"?}. Throws Error{SchemaError}.
    static AnswerRule from_json(const json& j);
    friend bool operator==(const AnswerRule&, const AnswerRule&) = default;
};

std::string_view rule_kind_name(AnswerRule::Kind k) noexcept;

/// One reference step. `output` is the recorded result summary.
struct Step {
    std::string tool;
    json input = json::object();
    json output;

    friend bool operator==(const Step&, const Step&) = default;
};

struct GroundTruth {
    std::vector<Step> steps;
    json answer;
    AnswerRule rule;

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct AccuracyResult {
    int score = 0;       ///< 0 or 1
    std::string reason;  ///< why it is 0; empty on a match
};

/// `answer` null means no answer was given (MissingAnswer, scored 0).
AccuracyResult accuracy(const json& answer, const json& reference, const AnswerRule& rule);

/// Lower-cased, trimmed, inner whitespace runs collapsed to one space.
std::string normalize_text(std::string_view s);

// ---- step-level metrics over tool-name sequences ---------------------------
// All take the prediction first. The reference must be non-empty
// (Error{EmptyInput} otherwise).

/// |pred| / |ref|.
double efficiency(std::size_t pred_steps, std::size_t ref_steps);
/// Share of distinct reference tools that appear anywhere in the prediction.
double tools_any_order(const std::vector<std::string>& pred, const std::vector<std::string>& ref);
/// Longest reference prefix embeddable as a subsequence of the prediction,
/// over the reference length. Greedy left-to-right matching.
double tools_in_order(const std::vector<std::string>& pred, const std::vector<std::string>& ref);
/// Longest common prefix of the two sequences over the reference length.
double tool_exact_match(const std::vector<std::string>& pred, const std::vector<std::string>& ref);

/// Path handling for argument comparison.
struct ParamOptions {
    /// Absolute prefixes removed from string arguments (workspace and data
    /// roots of both runs).
    std::vector<std::string> roots;
    double numeric_tol = 1e-9;
};

/// Path-normalized form of a string argument: separators unified, the first
/// matching root stripped, "." and ".." folded.
std::string normalize_path_arg(std::string_view s, const std::vector<std::string>& roots);

/// Deep equality after path normalization, numbers within `numeric_tol`.
bool arguments_equal(const json& a, const json& b, const ParamOptions& opts = {});

/// Longest prefix where tool names and argument maps both match, over the
/// reference length.
double parameter_accuracy(const std::vector<Step>& pred, const std::vector<Step>& ref,
                          const ParamOptions& opts = {});

// ---- error taxonomy --------------------------------------------------------

enum class Failure {
    UnawareOfTermination,
    ToolHallucination,
    FileHallucination,
    InvalidParameters,
    SystemError,
};
inline constexpr std::array<Failure, 5> kAllFailures{
    Failure::UnawareOfTermination, Failure::ToolHallucination, Failure::FileHallucination,
    Failure::InvalidParameters, Failure::SystemError};

std::string_view failure_name(Failure f) noexcept;

struct Histogram {
    std::array<std::size_t, 5> counts{};

    std::size_t& operator[](Failure f) { return counts[static_cast<std::size_t>(f)]; }
    std::size_t operator[](Failure f) const { return counts[static_cast<std::size_t>(f)]; }
    std::size_t total() const noexcept;
    Histogram& operator+=(const Histogram& o);
    json to_json() const;
    static Histogram from_json(const json& j);
    friend bool operator==(const Histogram&, const Histogram&) = default;
};

/// One count per failed step (its recorded class; a tool missing from
/// `registry` counts as a hallucination even without a class) plus one for
/// a trajectory cut off by the step limit.
Histogram classify_errors(const agent::Trajectory& t, const tools::Registry* registry = nullptr);

// ---- per-task scoring ------------------------------------------------------

std::vector<std::string> tool_names(const std::vector<agent::Action>& actions);
std::vector<std::string> tool_names(const std::vector<Step>& steps);
std::vector<Step> to_steps(const std::vector<agent::Action>& actions);

struct TaskScores {
    double accuracy = 0;
    double efficiency = 0;
    double tao = 0;
    double tio = 0;
    double tem = 0;
    double param = 0;

    friend bool operator==(const TaskScores&, const TaskScores&) = default;
};

struct TaskReport {
    std::string task_id;
    std::string modality;
    std::string regime;
    std::string model;
    TaskScores scores;
    std::string accuracy_reason;
    std::string stop_reason;
    std::size_t steps = 0;
    Histogram errors;

    json to_json() const;
    static TaskReport from_json(const json& j);
    friend bool operator==(const TaskReport&, const TaskReport&) = default;
};

/// Scores one trajectory against its reference. When the answer carries no
/// value, its text is parsed the way the LLM policy parses replies.
TaskReport score_task(const agent::Trajectory& pred, const GroundTruth& gt,
                      const ParamOptions& opts = {}, const tools::Registry* registry = nullptr);

} // namespace geoagent::eval
