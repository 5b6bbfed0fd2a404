// SPDX-License-Identifier: Apache-2.0
#include "geoagent/net/http.hpp"

#include "geoagent/error.hpp"
#include "httplib.h"

namespace geoagent::net {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path part without trailing slash
};

SplitUrl split(const std::string& url) {
    const auto scheme = url.find("://");
    const auto start = scheme == std::string::npos ? 0 : scheme + 3;
    const auto slash = url.find('/', start);
    if (slash == std::string::npos) return {url, ""};
    std::string prefix = url.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, slash), prefix};
}

} // namespace

nlohmann::json post_json(const std::string& base_url, const std::string& path,
                         const nlohmann::json& body, const HttpOptions& opts) {
    const SplitUrl u = split(base_url);
    httplib::Client cli(u.origin);
    if (!cli.is_valid())
        throw Error(Errc::EndpointUnreachable, "cannot use endpoint '" + base_url + "'");
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(opts.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(opts.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers(opts.headers.begin(), opts.headers.end());

    const auto res = cli.Post(u.prefix + path, headers, body.dump(), "application/json");
    if (!res)
        throw Error(Errc::EndpointUnreachable,
                    base_url + path + ": " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        throw Error(Errc::EndpointUnreachable, base_url + path + ": HTTP " +
                                                   std::to_string(res->status) + " " +
                                                   res->body.substr(0, 200));
    try {
        return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::EndpointUnreachable, base_url + path + ": reply is not JSON");
    }
}

} // namespace geoagent::net
