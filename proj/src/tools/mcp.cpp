// SPDX-License-Identifier: Apache-2.0
#include "geoagent/tools/mcp.hpp"

#include <istream>
#include <ostream>

namespace geoagent::tools {

namespace {

struct RpcError {
    int code;
    std::string message;
};

json error_reply(const json& id, int code, const std::string& message) {
    return {{"jsonrpc", "2.0"}, {"id", id}, {"error", {{"code", code}, {"message", message}}}};
}

bool valid_id(const json& id) { return id.is_string() || id.is_number_integer() || id.is_null(); }

} // namespace

json call_result(const ToolResult& r) {
    return {{"content", json::array({{{"type", "text"}, {"text", r.text}}})},
            {"isError", !r.ok},
            {"structured", r.to_json()}};
}

ToolResult result_from_call(const json& result) {
    if (!result.is_object()) throw Error(Errc::SchemaError, "tools/call result must be an object");
    if (result.contains("structured")) return ToolResult::from_json(result["structured"]);
    // Servers without the structured member: rebuild from the text block.
    ToolResult r;
    try {
        r.ok = !result.value("isError", false);
        for (const auto& c : result.at("content"))
            if (c.value("type", "") == "text") r.text += c.at("text").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(Errc::SchemaError, std::string("malformed tools/call result: ") + e.what());
    }
    if (!r.ok) r.error_class = ErrorClass::SystemError;
    return r;
}

McpServer::McpServer(const Registry& registry, ToolContext ctx, ServerInfo info)
    : registry_(registry), ctx_(ctx), info_(std::move(info)) {}

json McpServer::dispatch(const std::string& method, const json& params) const {
    if (method == "initialize") {
        std::string version(kProtocolVersion);
        if (params.contains("protocolVersion") && params["protocolVersion"].is_string()) {
            const auto asked = params["protocolVersion"].get<std::string>();
            if (asked < version) version = asked;
        }
        return {{"protocolVersion", version},
                {"capabilities", {{"tools", {{"listChanged", false}}}}},
                {"serverInfo", {{"name", info_.name}, {"version", info_.version}}}};
    }
    if (method == "ping") return json::object();
    if (method == "tools/list") {
        json tools = json::array();
        for (const ToolSpec* s : registry_.list()) tools.push_back(s->listing());
        return {{"tools", std::move(tools)}};
    }
    if (method == "tools/call") {
        if (!params.contains("name") || !params["name"].is_string())
            throw RpcError{rpc::kInvalidParams, "tools/call needs a string 'name'"};
        const json args = params.contains("arguments") ? params["arguments"] : json::object();
        if (!args.is_object()) throw RpcError{rpc::kInvalidParams, "'arguments' must be an object"};
        return call_result(registry_.call(params["name"].get<std::string>(), args, ctx_));
    }
    throw RpcError{rpc::kMethodNotFound, "method not found: " + method};
}

std::optional<json> McpServer::handle(const json& msg) const {
    if (!msg.is_object()) return error_reply(nullptr, rpc::kInvalidRequest, "request must be an object");
    const bool is_notification = !msg.contains("id");
    const json id = is_notification ? json(nullptr) : msg["id"];
    if (!valid_id(id)) return error_reply(nullptr, rpc::kInvalidRequest, "invalid id");
    if (msg.value("jsonrpc", "") != "2.0" || !msg.contains("method") || !msg["method"].is_string())
        return is_notification ? std::nullopt
                               : std::optional<json>(error_reply(id, rpc::kInvalidRequest, "not a JSON-RPC 2.0 request"));
    const json params = msg.contains("params") ? msg["params"] : json::object();
    if (!params.is_object()) {
        if (is_notification) return std::nullopt;
        return error_reply(id, rpc::kInvalidParams, "params must be an object");
    }
    const auto method = msg["method"].get<std::string>();
    if (is_notification) return std::nullopt;  // notifications/initialized and friends
    try {
        return json{{"jsonrpc", "2.0"}, {"id", id}, {"result", dispatch(method, params)}};
    } catch (const RpcError& e) {
        return error_reply(id, e.code, e.message);
    }
}

std::optional<std::string> McpServer::handle_line(std::string_view line) const {
    json msg;
    try {
        msg = json::parse(line);
    } catch (const json::parse_error& e) {
        return error_reply(nullptr, rpc::kParseError, std::string("parse error: ") + e.what()).dump();
    }
    if (msg.is_array()) return error_reply(nullptr, rpc::kInvalidRequest, "batch requests are not supported").dump();
    auto reply = handle(msg);
    if (!reply) return std::nullopt;
    return reply->dump();
}

void McpServer::serve_stream(std::istream& in, std::ostream& out) const {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (auto reply = handle_line(line)) out << *reply << '\n' << std::flush;
    }
}

} // namespace geoagent::tools
