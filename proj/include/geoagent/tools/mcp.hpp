// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <list>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "geoagent/tools/registry.hpp"

namespace geoagent::tools {

/// MCP revision this server speaks. Older client revisions are echoed back.
inline constexpr std::string_view kProtocolVersion = "2024-11-05";

namespace rpc {
inline constexpr int kParseError = -32700;
inline constexpr int kInvalidRequest = -32600;
inline constexpr int kMethodNotFound = -32601;
inline constexpr int kInvalidParams = -32602;
} // namespace rpc

struct ServerInfo {
    std::string name = "geoagent";
    std::string version = "0.1.0";
};

/// tools/call result body for a tool outcome.
json call_result(const ToolResult& r);
/// Inverse of call_result. Throws Error{SchemaError}.
ToolResult result_from_call(const json& result);

/// Stateless JSON-RPC 2.0 dispatcher over a registry. Safe to share between
/// connections: the registry and context are only read.
class McpServer {
public:
    McpServer(const Registry& registry, ToolContext ctx, ServerInfo info = {});

    /// Reply to one decoded message; nullopt for notifications.
    std::optional<json> handle(const json& msg) const;
    /// Same for one newline-free frame, including the parse error reply.
    std::optional<std::string> handle_line(std::string_view line) const;

    /// Newline-delimited loop until EOF on `in`.
    void serve_stream(std::istream& in, std::ostream& out) const;

private:
    json dispatch(const std::string& method, const json& params) const;

    const Registry& registry_;
    ToolContext ctx_;
    ServerInfo info_;
};

/// Newline-delimited JSON-RPC over TCP, one thread per connection.
class TcpServer {
public:
    /// Binds `host:port` (port 0 picks a free one). Throws Error{Internal}.
    TcpServer(const McpServer& server, const std::string& host = "127.0.0.1", std::uint16_t port = 0);
    ~TcpServer();
    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    std::uint16_t port() const noexcept { return port_; }
    /// Accepts in a background thread.
    void start();
    /// Blocks accepting until stop().
    void run();
    void stop();

private:
    void serve_connection(int fd);

    const McpServer& server_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::thread acceptor_;
    std::mutex mu_;
    std::list<std::pair<int, std::thread>> connections_;
};

/// Blocking client for the TCP transport.
class McpClient {
public:
    /// Throws Error{EndpointUnreachable}.
    McpClient(const std::string& host, std::uint16_t port);
    ~McpClient();
    McpClient(const McpClient&) = delete;
    McpClient& operator=(const McpClient&) = delete;

    /// Raw exchange of one frame.
    std::string exchange(const std::string& line);
    /// Request with a fresh id; returns the `result` member. JSON-RPC errors
    /// throw Error{EndpointUnreachable} carrying code and message.
    json request(const std::string& method, const json& params = json::object());
    void notify(const std::string& method, const json& params = json::object());

    json initialize(const std::string& client_name = "geoagent-client");
    std::vector<ToolSpec> list_tools();
    ToolResult call_tool(const std::string& name, const json& arguments);

private:
    std::string read_line();

    int fd_ = -1;
    long long next_id_ = 1;
    std::string buffer_;
};

} // namespace geoagent::tools
