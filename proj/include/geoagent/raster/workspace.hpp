// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "geoagent/raster/raster.hpp"

namespace geoagent::raster {

/// Where tool outputs land and where relative input paths are looked up.
///
/// Outputs must resolve inside `root`. Relative inputs are tried against
/// `root` first (previous tool outputs), then `data_root`.
class Workspace {
public:
    Workspace() = default;
    explicit Workspace(std::filesystem::path root, std::filesystem::path data_root = {});

    const std::filesystem::path& root() const noexcept { return root_; }
    const std::filesystem::path& data_root() const noexcept { return data_root_; }

    /// Absolute path for an output; creates parent directories.
    /// Throws Error{PathEscapesWorkspace} when `rel` leaves the root.
    std::filesystem::path resolve_output(const std::string& rel) const;

    /// Absolute path of an existing input file. Throws Error{MissingFile}.
    std::filesystem::path resolve_input(const std::string& p) const;

    /// Same for directories. Throws Error{MissingDirectory}.
    std::filesystem::path resolve_directory(const std::string& p) const;

    Raster load(const std::string& p) const;

    /// Saves as TIFF under the root and returns the absolute path.
    std::filesystem::path write(const Raster& r, const std::string& rel) const;

    /// Saves as TIFF and returns the tool response line
    /// "Result saved at <absolute path>".
    std::string save(const Raster& r, const std::string& rel) const;

private:
    std::filesystem::path candidate(const std::string& p) const;

    std::filesystem::path root_;
    std::filesystem::path data_root_;
};

/// The "Result saved at <path>" convention.
std::string saved_message(const std::filesystem::path& p);

} // namespace geoagent::raster
