// SPDX-License-Identifier: Apache-2.0
#include "geoagent/raster/workspace.hpp"

#include <algorithm>

#include "geoagent/error.hpp"
#include "geoagent/raster/io.hpp"

namespace geoagent::raster {

namespace fs = std::filesystem;

namespace {

fs::path absolute_normal(const fs::path& p) {
    std::error_code ec;
    fs::path abs = fs::weakly_canonical(fs::absolute(p), ec);
    if (ec) abs = fs::absolute(p).lexically_normal();
    return abs;
}

bool is_within(const fs::path& child, const fs::path& parent) {
    auto c = child.begin();
    for (auto p = parent.begin(); p != parent.end(); ++p, ++c) {
        if (p->empty()) continue;  // trailing separator
        if (c == child.end() || *c != *p) return false;
    }
    return true;
}

} // namespace

Workspace::Workspace(fs::path root, fs::path data_root)
    : root_(absolute_normal(root)), data_root_(data_root.empty() ? fs::path{} : absolute_normal(data_root)) {}

fs::path Workspace::resolve_output(const std::string& rel) const {
    if (rel.empty()) throw Error(Errc::InvalidArgument, "empty output path");
    if (root_.empty()) throw Error(Errc::InvalidArgument, "workspace root not configured");
    const fs::path p(rel);
    const fs::path target = absolute_normal(p.is_absolute() ? p : root_ / p);
    if (!is_within(target, root_) || target == root_)
        throw Error(Errc::PathEscapesWorkspace,
                    "output path '" + rel + "' resolves outside the workspace root");
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec)
        throw Error(Errc::WriteFailure,
                    "cannot create " + target.parent_path().string() + ": " + ec.message());
    return target;
}

fs::path Workspace::candidate(const std::string& p) const {
    const fs::path path(p);
    if (path.is_absolute()) return path;
    std::error_code ec;
    if (!root_.empty() && fs::exists(root_ / path, ec)) return root_ / path;
    if (!data_root_.empty() && fs::exists(data_root_ / path, ec)) return data_root_ / path;
    return root_.empty() ? fs::absolute(path) : root_ / path;
}

fs::path Workspace::resolve_input(const std::string& p) const {
    if (p.empty()) throw Error(Errc::MissingFile, "empty input path");
    const fs::path c = candidate(p).lexically_normal();
    std::error_code ec;
    if (!fs::is_regular_file(c, ec)) throw Error(Errc::MissingFile, "no such file: " + p);
    return c;
}

fs::path Workspace::resolve_directory(const std::string& p) const {
    const fs::path c = candidate(p.empty() ? std::string(".") : p).lexically_normal();
    std::error_code ec;
    if (!fs::is_directory(c, ec)) throw Error(Errc::MissingDirectory, "no such directory: " + p);
    return c;
}

Raster Workspace::load(const std::string& p) const { return load_raster(resolve_input(p)); }

fs::path Workspace::write(const Raster& r, const std::string& rel) const {
    const fs::path target = resolve_output(rel);
    write_tiff(r, target);
    return target;
}

std::string Workspace::save(const Raster& r, const std::string& rel) const {
    return saved_message(write(r, rel));
}

std::string saved_message(const fs::path& p) { return "Result saved at " + p.string(); }

} // namespace geoagent::raster
