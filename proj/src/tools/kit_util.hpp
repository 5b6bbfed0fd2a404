// SPDX-License-Identifier: Apache-2.0
// Spec builders and argument helpers shared by the kit registrations.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "geoagent/error.hpp"
#include "geoagent/tools/registry.hpp"

namespace geoagent::tools::kit {

inline ParamSpec param(std::string name, ParamType t, std::string desc) {
    ParamSpec p;
    p.name = std::move(name);
    p.type = t;
    p.description = std::move(desc);
    return p;
}

inline ParamSpec str(std::string n, std::string d) { return param(std::move(n), ParamType::String, std::move(d)); }
inline ParamSpec num(std::string n, std::string d) { return param(std::move(n), ParamType::Number, std::move(d)); }
inline ParamSpec integer(std::string n, std::string d) { return param(std::move(n), ParamType::Integer, std::move(d)); }

inline ParamSpec list(std::string n, ParamType item, std::string d, bool nullable = false) {
    ParamSpec p = param(std::move(n), ParamType::Array, std::move(d));
    p.item_type = item;
    p.nullable_items = nullable;
    return p;
}
inline ParamSpec paths(std::string n, std::string d) { return list(std::move(n), ParamType::String, std::move(d)); }
inline ParamSpec numbers(std::string n, std::string d) { return list(std::move(n), ParamType::Number, std::move(d)); }
/// Series values where null marks a missing sample.
inline ParamSpec series(std::string n, std::string d) { return list(std::move(n), ParamType::Number, std::move(d), true); }

inline ParamSpec optional(ParamSpec p, json fallback = nullptr) {
    p.required = false;
    if (!fallback.is_null()) p.default_value = std::move(fallback);
    return p;
}

inline ParamSpec one_of(ParamSpec p, std::vector<std::string> values) {
    p.enum_values = std::move(values);
    return p;
}

inline ParamSpec band(std::string n = "band_index") {
    return optional(integer(std::move(n), "1-based band number"), 1);
}

inline ToolSpec tool(std::string name, std::string category, std::string desc,
                     std::vector<ParamSpec> params) {
    return ToolSpec{std::move(name), std::move(category), std::move(desc), std::move(params)};
}

/// Lists that must pair up element by element.
inline void require_same_length(std::size_t a, std::size_t b, std::string_view what) {
    if (a != b)
        throw Error(Errc::PairCountMismatch, std::string(what) + ": " + std::to_string(a) +
                                                 " vs " + std::to_string(b) + " items");
}

} // namespace geoagent::tools::kit
