// SPDX-License-Identifier: Apache-2.0
#include "geoagent/tools/schema.hpp"

#include <algorithm>
#include <cmath>

#include "geoagent/error.hpp"

namespace geoagent::tools {

std::string_view param_type_name(ParamType t) noexcept {
    switch (t) {
    case ParamType::String: return "string";
    case ParamType::Number: return "number";
    case ParamType::Integer: return "integer";
    case ParamType::Boolean: return "boolean";
    case ParamType::Array: return "array";
    case ParamType::Object: return "object";
    }
    return "?";
}

namespace {

ParamType parse_type(const std::string& s) {
    for (ParamType t : {ParamType::String, ParamType::Number, ParamType::Integer,
                        ParamType::Boolean, ParamType::Array, ParamType::Object})
        if (param_type_name(t) == s) return t;
    throw Error(Errc::SchemaError, "unknown parameter type '" + s + "'");
}

bool matches(ParamType t, const json& v) {
    switch (t) {
    case ParamType::String: return v.is_string();
    case ParamType::Number: return v.is_number();
    case ParamType::Integer:
        if (v.is_number_integer()) return true;
        if (v.is_number_float()) {
            const double d = v.get<double>();
            return std::isfinite(d) && d == std::floor(d);
        }
        return false;
    case ParamType::Boolean: return v.is_boolean();
    case ParamType::Array: return v.is_array();
    case ParamType::Object: return v.is_object();
    }
    return false;
}

std::string kind_of(const json& v) {
    if (v.is_null()) return "null";
    if (v.is_string()) return "string";
    if (v.is_boolean()) return "boolean";
    if (v.is_number()) return "number";
    if (v.is_array()) return "array";
    return "object";
}

} // namespace

const ParamSpec* ToolSpec::param(std::string_view n) const noexcept {
    for (const auto& p : params)
        if (p.name == n) return &p;
    return nullptr;
}

json ToolSpec::input_schema() const {
    json props = json::object();
    json required = json::array();
    for (const auto& p : params) {
        json s = {{"type", param_type_name(p.type)}};
        if (!p.description.empty()) s["description"] = p.description;
        if (!p.enum_values.empty()) s["enum"] = p.enum_values;
        if (p.item_type) {
            if (p.nullable_items)
                s["items"] = {{"type", json::array({param_type_name(*p.item_type), "null"})}};
            else
                s["items"] = {{"type", param_type_name(*p.item_type)}};
        }
        if (p.default_value) s["default"] = *p.default_value;
        props[p.name] = std::move(s);
        if (p.required) required.push_back(p.name);
    }
    return {{"type", "object"},
            {"properties", std::move(props)},
            {"required", std::move(required)},
            {"additionalProperties", false}};
}

json ToolSpec::listing() const {
    return {{"name", name}, {"description", description}, {"inputSchema", input_schema()}};
}

ToolSpec ToolSpec::from_listing(const json& entry) {
    ToolSpec s;
    try {
        s.name = entry.at("name").get<std::string>();
        s.description = entry.value("description", "");
        const json& schema = entry.at("inputSchema");
        std::vector<std::string> required;
        if (schema.contains("required")) required = schema["required"].get<std::vector<std::string>>();
        for (const auto& [key, p] : schema.at("properties").items()) {
            ParamSpec ps;
            ps.name = key;
            ps.type = parse_type(p.at("type").get<std::string>());
            ps.description = p.value("description", "");
            ps.required = std::find(required.begin(), required.end(), key) != required.end();
            if (p.contains("enum")) ps.enum_values = p["enum"].get<std::vector<std::string>>();
            if (p.contains("items")) {
                const json& t = p["items"].at("type");
                if (t.is_array()) {
                    ps.item_type = parse_type(t.at(0).get<std::string>());
                    ps.nullable_items = true;
                } else {
                    ps.item_type = parse_type(t.get<std::string>());
                }
            }
            if (p.contains("default")) ps.default_value = p["default"];
            s.params.push_back(std::move(ps));
        }
        // Properties come back key-sorted; restore the declared order of the
        // required parameters, optional ones after them.
        auto rank = [&](const ParamSpec& p) {
            const auto it = std::find(required.begin(), required.end(), p.name);
            return it == required.end() ? required.size() : std::size_t(it - required.begin());
        };
        std::stable_sort(s.params.begin(), s.params.end(),
                         [&](const ParamSpec& a, const ParamSpec& b) { return rank(a) < rank(b); });
    } catch (const json::exception& e) {
        throw Error(Errc::SchemaError, std::string("malformed tool listing: ") + e.what());
    }
    return s;
}

void validate_arguments(const ToolSpec& spec, const json& args) {
    if (!args.is_object())
        throw Error(Errc::SchemaError, "arguments must be an object, got " + kind_of(args));
    for (const auto& [key, value] : args.items()) {
        const ParamSpec* p = spec.param(key);
        if (!p) throw Error(Errc::SchemaError, "unexpected argument '" + key + "'");
        if (!matches(p->type, value))
            throw Error(Errc::SchemaError, "argument '" + key + "' must be " +
                                               std::string(param_type_name(p->type)) + ", got " +
                                               kind_of(value));
        if (!p->enum_values.empty() &&
            std::find(p->enum_values.begin(), p->enum_values.end(), value.get<std::string>()) ==
                p->enum_values.end())
            throw Error(Errc::SchemaError, "argument '" + key + "' must be one of " +
                                               json(p->enum_values).dump());
        if (p->item_type) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                const json& item = value[i];
                if (item.is_null() && p->nullable_items) continue;
                if (!matches(*p->item_type, item))
                    throw Error(Errc::SchemaError,
                                "argument '" + key + "' element " + std::to_string(i) +
                                    " must be " + std::string(param_type_name(*p->item_type)) +
                                    ", got " + kind_of(item));
            }
        }
    }
    for (const auto& p : spec.params)
        if (p.required && !args.contains(p.name))
            throw Error(Errc::SchemaError, "missing required argument '" + p.name + "'");
}

} // namespace geoagent::tools
