// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "geoagent/error.hpp"
#include "geoagent/tools/mcp.hpp"
#include "mcp_harness.hpp"
#include "test_util.hpp"

using namespace geoagent;
using namespace geoagent::tools;
using testutil::TempDir;
namespace fs = std::filesystem;

namespace {

using mcp_harness::golden_cases;
using mcp_harness::random_call;

struct Fixture {
    TempDir dir;
    raster::Workspace ws{dir.path()};
    Registry registry = build_default_registry();
    McpServer server{registry, ToolContext{&ws, nullptr}};

    Fixture() { mcp_harness::seed_inputs(dir.path()); }
};

void check_golden(const std::string& file, const json& c, const std::optional<std::string>& reply) {
    CAPTURE(file);
    const std::string why = mcp_harness::golden_mismatch(c, reply);
    CHECK_MESSAGE(why.empty(), why);
}

} // namespace

TEST_CASE("golden wire fixtures, in process") {
    Fixture fx;
    const auto cases = golden_cases();
    REQUIRE(cases.size() >= 14);
    for (const auto& [file, c] : cases) check_golden(file, c, fx.server.handle_line(c["request"].get<std::string>()));
}

TEST_CASE("golden wire fixtures over TCP") {
    Fixture fx;
    TcpServer tcp(fx.server);
    tcp.start();
    McpClient client("127.0.0.1", tcp.port());
    for (const auto& [file, c] : golden_cases()) {
        const std::string req = c["request"].get<std::string>();
        if (c["response"].is_null()) {
            // No reply may arrive: the first frame back must answer the ping
            // sent right after the notification.
            const json next = json::parse(client.exchange(
                req + "\n" + R"({"jsonrpc":"2.0","id":"after-notification","method":"ping"})"));
            CHECK(next["id"] == "after-notification");
            continue;
        }
        check_golden(file, c, client.exchange(req));
    }
    tcp.stop();
}

TEST_CASE("stream transport") {
    Fixture fx;
    std::istringstream in(
        "{\"jsonrpc\":\"2.0\",\"id\":1,\"method\":\"ping\"}\n"
        "\n"
        "{\"jsonrpc\":\"2.0\",\"method\":\"notifications/initialized\"}\r\n"
        "not json\n"
        "[1,2]\n"
        "{\"jsonrpc\":\"2.0\",\"id\":2,\"method\":\"tools/call\",\"params\":{\"name\":\"ceil_number\",\"arguments\":{\"number\":1.5}}}\n");
    std::ostringstream out;
    fx.server.serve_stream(in, out);
    std::istringstream lines(out.str());
    std::vector<json> replies;
    for (std::string l; std::getline(lines, l);) replies.push_back(json::parse(l));
    REQUIRE(replies.size() == 4);
    CHECK(replies[0]["id"] == 1);
    CHECK(replies[1]["error"]["code"] == rpc::kParseError);
    CHECK(replies[2]["error"]["code"] == rpc::kInvalidRequest);
    CHECK(replies[3]["result"]["structured"]["value"] == 2);
}

TEST_CASE("client helpers and listing round trip over the wire") {
    Fixture fx;
    TcpServer tcp(fx.server);
    tcp.start();
    McpClient client("127.0.0.1", tcp.port());
    const json init = client.initialize();
    CHECK(init["protocolVersion"] == std::string(kProtocolVersion));
    const auto specs = client.list_tools();
    REQUIRE(specs.size() == fx.registry.size());
    const auto local = fx.registry.list();
    for (std::size_t i = 0; i < specs.size(); ++i) CHECK(specs[i].listing() == local[i]->listing());
    try {
        (void)client.request("prompts/list");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EndpointUnreachable);
    }
    tcp.stop();
    CHECK_THROWS_AS(McpClient("127.0.0.1", tcp.port()), Error);
}

TEST_CASE("wire result equals in-process result on randomized calls") {
    Fixture fx;
    TcpServer tcp(fx.server);
    tcp.start();
    McpClient client("127.0.0.1", tcp.port());
    client.initialize();
    const ToolContext ctx{&fx.ws, nullptr};
    std::mt19937_64 rng(2024);
    int errors = 0;
    for (int i = 0; i < 50; ++i) {
        const auto [name, args] = random_call(rng);
        CAPTURE(name);
        CAPTURE(args.dump());
        const ToolResult local = fx.registry.call(name, args, ctx);
        const ToolResult wire = client.call_tool(name, args);
        CHECK(wire == local);
        if (!local.ok) ++errors;
    }
    MESSAGE(errors << " of 50 randomized calls were errors");
    CHECK(errors > 0);
    CHECK(errors < 50);
    tcp.stop();
}

TEST_CASE("concurrent sessions") {
    Fixture fx;
    TcpServer tcp(fx.server);
    tcp.start();
    std::vector<std::thread> threads;
    std::atomic<int> ok{0};
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&, t] {
            McpClient c("127.0.0.1", tcp.port());
            for (int i = 0; i < 20; ++i) {
                const auto r = c.call_tool("multiply", {{"a", t}, {"b", i}});
                if (r.ok && r.value == double(t * i)) ++ok;
            }
        });
    for (auto& th : threads) th.join();
    CHECK(ok == 80);
    tcp.stop();
}
