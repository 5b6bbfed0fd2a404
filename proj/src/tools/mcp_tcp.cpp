// SPDX-License-Identifier: Apache-2.0
#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "geoagent/tools/mcp.hpp"

namespace geoagent::tools {

namespace {

constexpr std::size_t kMaxFrame = 64u << 20;

bool send_all(int fd, std::string_view data) {
    while (!data.empty()) {
        const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return false;
        data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
}

/// Next '\n'-terminated frame from `fd`, using `buf` for leftovers.
/// nullopt on EOF, error or an oversized frame.
std::optional<std::string> recv_line(int fd, std::string& buf) {
    for (;;) {
        if (const auto nl = buf.find('\n'); nl != std::string::npos) {
            std::string line = buf.substr(0, nl);
            buf.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        if (buf.size() > kMaxFrame) return std::nullopt;
        char chunk[65536];
        const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return std::nullopt;
        buf.append(chunk, static_cast<std::size_t>(n));
    }
}

} // namespace

// ---- server --------------------------------------------------------------

TcpServer::TcpServer(const McpServer& server, const std::string& host, std::uint16_t port)
    : server_(server) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (listen_fd_ < 0) throw Error(Errc::Internal, std::string("socket: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(listen_fd_);
        throw Error(Errc::Internal, "not an IPv4 address: " + host);
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
        ::listen(listen_fd_, 64) < 0) {
        const std::string why = std::strerror(errno);
        ::close(listen_fd_);
        throw Error(Errc::Internal, "cannot listen on " + host + ":" + std::to_string(port) + ": " + why);
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
    stop();
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpServer::start() {
    acceptor_ = std::thread([this] { run(); });
}

void TcpServer::run() {
    while (!stopping_) {
        const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (fd < 0) {
            if (errno == EINTR || errno == ECONNABORTED) continue;
            break;
        }
        const int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        std::lock_guard lock(mu_);
        if (stopping_) {
            ::close(fd);
            break;
        }
        // Reap finished sessions so long runs do not accumulate threads.
        for (auto it = connections_.begin(); it != connections_.end();) {
            if (it->first < 0) {
                it->second.join();
                it = connections_.erase(it);
            } else {
                ++it;
            }
        }
        auto& slot = connections_.emplace_back(fd, std::thread());
        slot.second = std::thread([this, fd] { serve_connection(fd); });
    }
}

void TcpServer::serve_connection(int fd) {
    std::string buf;
    while (auto line = recv_line(fd, buf)) {
        if (line->find_first_not_of(" \t") == std::string::npos) continue;
        if (auto reply = server_.handle_line(*line))
            if (!send_all(fd, *reply + "\n")) break;
    }
    std::lock_guard lock(mu_);
    for (auto& [cfd, _] : connections_)
        if (cfd == fd) cfd = -1;
    ::close(fd);
}

void TcpServer::stop() {
    if (stopping_.exchange(true)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    if (acceptor_.joinable()) acceptor_.join();
    std::list<std::pair<int, std::thread>> conns;
    {
        std::lock_guard lock(mu_);
        for (auto& [fd, _] : connections_)
            if (fd >= 0) ::shutdown(fd, SHUT_RDWR);
        conns.swap(connections_);
    }
    for (auto& [_, t] : conns)
        if (t.joinable()) t.join();
}

// ---- client --------------------------------------------------------------

McpClient::McpClient(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string where = host + ":" + std::to_string(port);
    if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0)
        throw Error(Errc::EndpointUnreachable, "cannot resolve " + where);
    for (addrinfo* p = res; p; p = p->ai_next) {
        fd_ = ::socket(p->ai_family, p->ai_socktype | SOCK_CLOEXEC, p->ai_protocol);
        if (fd_ < 0) continue;
        if (::connect(fd_, p->ai_addr, p->ai_addrlen) == 0) break;
        ::close(fd_);
        fd_ = -1;
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) throw Error(Errc::EndpointUnreachable, "cannot connect to " + where);
    const int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

McpClient::~McpClient() {
    if (fd_ >= 0) ::close(fd_);
}

std::string McpClient::read_line() {
    auto line = recv_line(fd_, buffer_);
    if (!line) throw Error(Errc::EndpointUnreachable, "connection closed by server");
    return *line;
}

std::string McpClient::exchange(const std::string& line) {
    if (!send_all(fd_, line + "\n")) throw Error(Errc::EndpointUnreachable, "send failed");
    return read_line();
}

json McpClient::request(const std::string& method, const json& params) {
    const long long id = next_id_++;
    const json msg = {{"jsonrpc", "2.0"}, {"id", id}, {"method", method}, {"params", params}};
    json reply;
    try {
        reply = json::parse(exchange(msg.dump()));
    } catch (const json::parse_error& e) {
        throw Error(Errc::EndpointUnreachable, std::string("malformed reply: ") + e.what());
    }
    if (reply.contains("error"))
        throw Error(Errc::EndpointUnreachable,
                    "JSON-RPC error " + reply["error"].value("code", json(0)).dump() + ": " +
                        reply["error"].value("message", ""));
    if (reply.value("id", json()) != json(id) || !reply.contains("result"))
        throw Error(Errc::EndpointUnreachable, "reply does not answer request " + std::to_string(id));
    return reply["result"];
}

void McpClient::notify(const std::string& method, const json& params) {
    const json msg = {{"jsonrpc", "2.0"}, {"method", method}, {"params", params}};
    if (!send_all(fd_, msg.dump() + "\n")) throw Error(Errc::EndpointUnreachable, "send failed");
}

json McpClient::initialize(const std::string& client_name) {
    json r = request("initialize", {{"protocolVersion", kProtocolVersion},
                                    {"capabilities", json::object()},
                                    {"clientInfo", {{"name", client_name}, {"version", "0.1.0"}}}});
    notify("notifications/initialized");
    return r;
}

std::vector<ToolSpec> McpClient::list_tools() {
    std::vector<ToolSpec> out;
    const json listing = request("tools/list");
    for (const auto& t : listing.at("tools")) out.push_back(ToolSpec::from_listing(t));
    return out;
}

ToolResult McpClient::call_tool(const std::string& name, const json& arguments) {
    return result_from_call(request("tools/call", {{"name", name}, {"arguments", arguments}}));
}

} // namespace geoagent::tools
