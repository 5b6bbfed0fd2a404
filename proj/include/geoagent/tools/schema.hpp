// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace geoagent::tools {

using nlohmann::json;

enum class ParamType { String, Number, Integer, Boolean, Array, Object };

std::string_view param_type_name(ParamType t) noexcept;

struct ParamSpec {
    std::string name;
    ParamType type = ParamType::String;
    std::string description;
    bool required = true;
    std::vector<std::string> enum_values;   ///< strings only; empty = unconstrained
    std::optional<ParamType> item_type;     ///< element type for arrays
    bool nullable_items = false;            ///< arrays: null elements allowed (missing values)
    std::optional<json> default_value;      ///< advertised default for optional params
};

struct ToolSpec {
    std::string name;
    std::string category;  ///< Index, Inversion, Perception, Analysis, Statistics
    std::string description;
    std::vector<ParamSpec> params;

    const ParamSpec* param(std::string_view name) const noexcept;

    /// JSON Schema object with `additionalProperties: false`.
    json input_schema() const;
    /// {name, description, inputSchema}, the MCP listing entry.
    json listing() const;
    /// Rebuilds a spec from its listing entry.
    static ToolSpec from_listing(const json& entry);
};

/// Checks `args` against the closed schema. Throws Error{SchemaError} naming
/// the first offending key.
void validate_arguments(const ToolSpec& spec, const json& args);

} // namespace geoagent::tools
