// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoagent/error.hpp"
#include "geoagent/perception/expert.hpp"
#include "geoagent/raster/workspace.hpp"
#include "geoagent/tools/schema.hpp"

namespace geoagent::tools {

/// Tool failure taxonomy. Unaware-of-termination is a trajectory-level
/// class and lives in the evaluator.
enum class ErrorClass { ToolHallucination, FileHallucination, InvalidParameters, SystemError };

std::string_view error_class_name(ErrorClass c) noexcept;
std::optional<ErrorClass> parse_error_class(std::string_view s) noexcept;

/// Class of a handler failure with code `code`.
ErrorClass classify(Errc code) noexcept;

struct ToolResult {
    bool ok = true;
    std::string text;
    json value;                      ///< structured payload, null when none
    std::vector<std::string> files;  ///< absolute paths written
    std::optional<ErrorClass> error_class;

    static ToolResult success(json value, std::string text = {});
    static ToolResult saved(const std::filesystem::path& p);
    static ToolResult saved_many(const std::vector<std::filesystem::path>& ps);
    static ToolResult failure(ErrorClass c, std::string message);

    json to_json() const;
    static ToolResult from_json(const json& j);
    friend bool operator==(const ToolResult&, const ToolResult&) = default;
};

/// What handlers may touch during a call.
struct ToolContext {
    const raster::Workspace* workspace = nullptr;
    const perception::ExpertBackend* expert = nullptr;

    const raster::Workspace& ws() const;
};

/// Read access to validated arguments, with defaults.
class Args {
public:
    explicit Args(const json& j) : j_(j) {}

    bool has(std::string_view key) const;
    const json& raw(std::string_view key) const;
    std::string str(std::string_view key) const;
    std::optional<std::string> opt_str(std::string_view key) const;
    double num(std::string_view key) const;
    double num_or(std::string_view key, double fallback) const;
    long long integer(std::string_view key) const;
    long long integer_or(std::string_view key, long long fallback) const;
    bool boolean_or(std::string_view key, bool fallback) const;
    std::vector<std::string> strs(std::string_view key) const;
    /// Numeric list; null elements become NaN.
    std::vector<double> nums(std::string_view key) const;
    /// 1-based band argument converted to a 0-based index.
    std::size_t band_or(std::string_view key, std::size_t fallback_one_based = 1) const;

private:
    const json& j_;
};

using Handler = std::function<ToolResult(const Args&, const ToolContext&)>;

class Registry {
public:
    /// Throws Error{DuplicateName}; also checks the tool spec for duplicate
    /// parameters (Error{SchemaError}).
    void add(ToolSpec spec, Handler handler);

    const ToolSpec* find(std::string_view name) const noexcept;
    bool contains(std::string_view name) const noexcept { return find(name) != nullptr; }
    std::size_t size() const noexcept { return tools_.size(); }
    /// Sorted by name.
    std::vector<const ToolSpec*> list() const;

    /// Never throws: unknown names, schema violations and handler failures
    /// come back as classified error results.
    ToolResult call(std::string_view name, const json& args, const ToolContext& ctx) const;

private:
    struct Entry {
        ToolSpec spec;
        Handler handler;
    };
    std::map<std::string, Entry, std::less<>> tools_;
};

/// Every toolkit operation under its tool name.
Registry build_default_registry();

void register_index_tools(Registry& r);
void register_inversion_tools(Registry& r);
void register_perception_tools(Registry& r);
void register_analysis_tools(Registry& r);
void register_statistics_tools(Registry& r);

} // namespace geoagent::tools
