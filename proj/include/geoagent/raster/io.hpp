// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "geoagent/raster/raster.hpp"

namespace geoagent::raster {

enum class Compression { None, Deflate };

struct WriteOptions {
    Compression compression = Compression::None;
};

/// Reads a baseline-strip TIFF (u8/u16/f32, chunky or planar, raw or
/// Deflate) or an 8-bit gray/RGB PNG.
///
/// Throws Error{MissingFile} when the path does not exist,
/// Error{UnsupportedLayout} for TIFF features outside the subset and
/// Error{CorruptFile} for truncated or inconsistent files.
Raster load_raster(const std::filesystem::path& path);

/// Writes `r` as a little-endian, band-sequential (planar) TIFF.
void write_tiff(const Raster& r, const std::filesystem::path& path, WriteOptions opts = {});

/// Writes an 8-bit gray or RGB PNG. Used for RGB fixtures.
void write_png(const Raster& r, const std::filesystem::path& path);

/// TIFF bytes for `r`, as write_tiff would emit them.
std::string encode_tiff(const Raster& r, WriteOptions opts = {});
Raster decode_tiff(std::string_view bytes);

} // namespace geoagent::raster
