// SPDX-License-Identifier: Apache-2.0
#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>

#include "geoagent/error.hpp"
#include "geoagent/raster/io.hpp"

namespace geoagent::raster {

namespace {

constexpr unsigned char kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::MissingFile, "cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(f), {});
}

Raster decode_png(const std::string& bytes) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()))
        throw Error(Errc::CorruptFile, std::string("corrupt PNG: ") + img.message);
    const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
    img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const std::size_t bands = color ? 3 : 1;
    std::vector<png_byte> buf(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
        png_image_free(&img);
        throw Error(Errc::CorruptFile, std::string("corrupt PNG: ") + img.message);
    }
    const std::size_t w = img.width, h = img.height;
    Raster out(w, h, bands, DataType::U8);
    auto data = out.data();
    for (std::size_t p = 0; p < w * h; ++p)
        for (std::size_t b = 0; b < bands; ++b) data[b * w * h + p] = buf[p * bands + b];
    return out;
}

} // namespace

Raster load_raster(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
        throw Error(Errc::MissingFile, "no such file: " + path.string());
    const std::string bytes = read_file(path);
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngMagic, 8) == 0) return decode_png(bytes);
    return decode_tiff(bytes);
}

void write_png(const Raster& r, const std::filesystem::path& path) {
    if (r.dtype() != DataType::U8 || (r.bands() != 1 && r.bands() != 3))
        throw Error(Errc::WrongDtype, "PNG output needs 8-bit gray or RGB");
    const std::size_t w = r.width(), h = r.height(), bands = r.bands();
    std::vector<png_byte> buf(w * h * bands);
    auto data = r.data();
    for (std::size_t p = 0; p < w * h; ++p)
        for (std::size_t b = 0; b < bands; ++b)
            buf[p * bands + b] = static_cast<png_byte>(data[b * w * h + p]);
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(w);
    img.height = static_cast<png_uint_32>(h);
    img.format = bands == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&img, path.c_str(), 0, buf.data(), 0, nullptr))
        throw Error(Errc::WriteFailure, std::string("PNG write failed: ") + img.message);
}

} // namespace geoagent::raster
