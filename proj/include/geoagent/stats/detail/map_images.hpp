// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "geoagent/error.hpp"

namespace geoagent::stats {

template <class F>
auto map_images(const Workspace& ws, std::span<const std::string> paths, F&& f)
    -> std::vector<decltype(f(std::declval<const Raster&>()))> {
    if (paths.empty()) throw Error(Errc::EmptyBatch, "no images given");
    std::vector<decltype(f(std::declval<const Raster&>()))> out;
    out.reserve(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        try {
            out.push_back(f(ws.load(paths[i])));
        } catch (const Error& e) {
            rethrow_with_index(e, i);
        }
    }
    return out;
}

} // namespace geoagent::stats
