// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <map>
#include <string>

#include "json.hpp"

namespace geoagent::net {

struct HttpOptions {
    std::chrono::milliseconds timeout{60000};
    std::map<std::string, std::string> headers;
};

/// POSTs `body` as JSON to `base_url` + `path` and parses the JSON reply.
///
/// `base_url` is "http://host:port" (or "https://..." when built with
/// OpenSSL), optionally with a path prefix. Throws
/// Error{EndpointUnreachable} on connection failure, non-2xx status, or a
/// reply that is not JSON.
nlohmann::json post_json(const std::string& base_url, const std::string& path,
                         const nlohmann::json& body, const HttpOptions& opts = {});

} // namespace geoagent::net
