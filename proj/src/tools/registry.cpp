// SPDX-License-Identifier: Apache-2.0
#include "geoagent/tools/registry.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace geoagent::tools {

namespace fs = std::filesystem;

std::string_view error_class_name(ErrorClass c) noexcept {
    switch (c) {
    case ErrorClass::ToolHallucination: return "ToolHallucination";
    case ErrorClass::FileHallucination: return "FileHallucination";
    case ErrorClass::InvalidParameters: return "InvalidParameters";
    case ErrorClass::SystemError: return "SystemError";
    }
    return "?";
}

std::optional<ErrorClass> parse_error_class(std::string_view s) noexcept {
    for (ErrorClass c : {ErrorClass::ToolHallucination, ErrorClass::FileHallucination,
                         ErrorClass::InvalidParameters, ErrorClass::SystemError})
        if (error_class_name(c) == s) return c;
    return std::nullopt;
}

ErrorClass classify(Errc code) noexcept {
    switch (code) {
    case Errc::MissingFile:
    case Errc::MissingDirectory: return ErrorClass::FileHallucination;
    case Errc::WriteFailure:
    case Errc::EndpointUnreachable:
    case Errc::DuplicateName:
    case Errc::Internal:
    case Errc::MalformedModelOutput:
    case Errc::PolicyUnreachable: return ErrorClass::SystemError;
    default: return ErrorClass::InvalidParameters;
    }
}

// ---- results -------------------------------------------------------------

ToolResult ToolResult::success(json value, std::string text) {
    ToolResult r;
    if (text.empty()) text = value.is_string() ? value.get<std::string>() : value.dump();
    r.text = std::move(text);
    r.value = std::move(value);
    return r;
}

ToolResult ToolResult::saved(const fs::path& p) {
    ToolResult r = success(p.string(), raster::saved_message(p));
    r.files = {p.string()};
    return r;
}

ToolResult ToolResult::saved_many(const std::vector<fs::path>& ps) {
    json arr = json::array();
    std::string text;
    ToolResult r;
    for (const auto& p : ps) {
        arr.push_back(p.string());
        if (!text.empty()) text += '\n';
        text += raster::saved_message(p);
        r.files.push_back(p.string());
    }
    r.value = std::move(arr);
    r.text = std::move(text);
    return r;
}

ToolResult ToolResult::failure(ErrorClass c, std::string message) {
    ToolResult r;
    r.ok = false;
    r.error_class = c;
    r.text = std::move(message);
    return r;
}

json ToolResult::to_json() const {
    json j = {{"status", ok ? "ok" : "error"}, {"text", text}};
    if (!value.is_null()) j["value"] = value;
    if (!files.empty()) j["files"] = files;
    if (error_class) j["error_class"] = error_class_name(*error_class);
    return j;
}

ToolResult ToolResult::from_json(const json& j) {
    ToolResult r;
    try {
        r.ok = j.at("status").get<std::string>() == "ok";
        r.text = j.value("text", "");
        if (j.contains("value")) r.value = j["value"];
        if (j.contains("files")) r.files = j["files"].get<std::vector<std::string>>();
        if (j.contains("error_class")) {
            r.error_class = parse_error_class(j["error_class"].get<std::string>());
            if (!r.error_class) throw Error(Errc::SchemaError, "unknown error class");
        }
    } catch (const json::exception& e) {
        throw Error(Errc::SchemaError, std::string("malformed tool result: ") + e.what());
    }
    if (!r.ok && !r.error_class) throw Error(Errc::SchemaError, "error result without a class");
    return r;
}

const raster::Workspace& ToolContext::ws() const {
    if (!workspace) throw Error(Errc::Internal, "no workspace configured");
    return *workspace;
}

// ---- arguments -----------------------------------------------------------

bool Args::has(std::string_view key) const { return j_.contains(key); }

const json& Args::raw(std::string_view key) const {
    const auto it = j_.find(key);
    if (it == j_.end()) throw Error(Errc::SchemaError, "missing argument '" + std::string(key) + "'");
    return *it;
}

std::string Args::str(std::string_view key) const { return raw(key).get<std::string>(); }

std::optional<std::string> Args::opt_str(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return str(key);
}

double Args::num(std::string_view key) const { return raw(key).get<double>(); }

double Args::num_or(std::string_view key, double fallback) const {
    return has(key) ? num(key) : fallback;
}

long long Args::integer(std::string_view key) const {
    const json& v = raw(key);
    return v.is_number_integer() ? v.get<long long>() : static_cast<long long>(v.get<double>());
}

long long Args::integer_or(std::string_view key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
}

bool Args::boolean_or(std::string_view key, bool fallback) const {
    return has(key) ? raw(key).get<bool>() : fallback;
}

std::vector<std::string> Args::strs(std::string_view key) const {
    return raw(key).get<std::vector<std::string>>();
}

std::vector<double> Args::nums(std::string_view key) const {
    std::vector<double> out;
    for (const auto& v : raw(key))
        out.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
    return out;
}

std::size_t Args::band_or(std::string_view key, std::size_t fallback_one_based) const {
    const long long b = integer_or(key, static_cast<long long>(fallback_one_based));
    if (b < 1)
        throw Error(Errc::BandOutOfRange, std::string(key) + " is 1-based, got " + std::to_string(b));
    return static_cast<std::size_t>(b - 1);
}

// ---- registry ------------------------------------------------------------

void Registry::add(ToolSpec spec, Handler handler) {
    if (tools_.count(spec.name))
        throw Error(Errc::DuplicateName, "tool '" + spec.name + "' is already registered");
    std::set<std::string> seen;
    for (const auto& p : spec.params)
        if (!seen.insert(p.name).second)
            throw Error(Errc::SchemaError, "tool '" + spec.name + "' repeats parameter '" + p.name + "'");
    auto name = spec.name;
    tools_.emplace(std::move(name), Entry{std::move(spec), std::move(handler)});
}

const ToolSpec* Registry::find(std::string_view name) const noexcept {
    const auto it = tools_.find(name);
    return it == tools_.end() ? nullptr : &it->second.spec;
}

std::vector<const ToolSpec*> Registry::list() const {
    std::vector<const ToolSpec*> out;
    out.reserve(tools_.size());
    for (const auto& [_, e] : tools_) out.push_back(&e.spec);
    return out;
}

ToolResult Registry::call(std::string_view name, const json& args, const ToolContext& ctx) const {
    const auto it = tools_.find(name);
    if (it == tools_.end())
        return ToolResult::failure(ErrorClass::ToolHallucination,
                                   "unknown tool '" + std::string(name) + "'");
    const Entry& e = it->second;
    try {
        validate_arguments(e.spec, args);
    } catch (const Error& err) {
        return ToolResult::failure(ErrorClass::InvalidParameters, err.what());
    }
    try {
        return e.handler(Args(args), ctx);
    } catch (const Error& err) {
        return ToolResult::failure(classify(err.code()),
                                   std::string(errc_name(err.code())) + ": " + err.what());
    } catch (const std::exception& err) {
        return ToolResult::failure(ErrorClass::SystemError, err.what());
    } catch (...) {
        return ToolResult::failure(ErrorClass::SystemError, "unknown failure");
    }
}

Registry build_default_registry() {
    Registry r;
    register_index_tools(r);
    register_inversion_tools(r);
    register_perception_tools(r);
    register_analysis_tools(r);
    register_statistics_tools(r);
    return r;
}

} // namespace geoagent::tools
