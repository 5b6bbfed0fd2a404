// SPDX-License-Identifier: Apache-2.0
// Baseline TIFF subset: strips only, uncompressed or Deflate, 8/16-bit
// unsigned and 32-bit float samples, chunky or planar. Anything else is
// rejected with UnsupportedLayout.
#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "geoagent/error.hpp"
#include "geoagent/raster/io.hpp"

namespace geoagent::raster {

namespace {

enum Tag : std::uint16_t {
    kImageWidth = 256,
    kImageLength = 257,
    kBitsPerSample = 258,
    kCompression = 259,
    kPhotometric = 262,
    kStripOffsets = 273,
    kSamplesPerPixel = 277,
    kRowsPerStrip = 278,
    kStripByteCounts = 279,
    kPlanarConfig = 284,
    kPredictor = 317,
    kTileWidth = 322,
    kExtraSamples = 338,
    kSampleFormat = 339,
    kModelPixelScale = 33550,
    kModelTiepoint = 33922,
    kGdalNodata = 42113,
};

enum FieldType : std::uint16_t {
    kByte = 1, kAscii = 2, kShort = 3, kLong = 4, kRational = 5, kSByte = 6, kUndefined = 7,
    kSShort = 8, kSLong = 9, kSRational = 10, kFloat = 11, kDouble = 12,
};

std::size_t type_size(std::uint16_t type) {
    switch (type) {
    case kByte: case kAscii: case kSByte: case kUndefined: return 1;
    case kShort: case kSShort: return 2;
    case kLong: case kSLong: case kFloat: return 4;
    case kRational: case kSRational: case kDouble: return 8;
    default: return 0;
    }
}

// Swap granularity: rationals are pairs of 4-byte words.
std::size_t swap_unit(std::uint16_t type) {
    return (type == kRational || type == kSRational) ? 4 : type_size(type);
}

[[noreturn]] void corrupt(const std::string& what) {
    throw Error(Errc::CorruptFile, "corrupt TIFF: " + what);
}

[[noreturn]] void unsupported(const std::string& what) {
    throw Error(Errc::UnsupportedLayout, "unsupported TIFF layout: " + what);
}

class Reader {
public:
    explicit Reader(std::string_view buf) : buf_(buf) {
        if (buf_.size() < 8) corrupt("file shorter than header");
        if (buf_.substr(0, 2) == "II")
            big_ = false;
        else if (buf_.substr(0, 2) == "MM")
            big_ = true;
        else
            corrupt("bad byte-order mark");
        const auto magic = u16(2);
        if (magic == 43) unsupported("BigTIFF");
        if (magic != 42) corrupt("bad magic number");
    }

    bool big_endian() const { return big_; }
    std::size_t size() const { return buf_.size(); }

    void need(std::size_t off, std::size_t len) const {
        if (off > buf_.size() || len > buf_.size() - off) corrupt("offset out of bounds");
    }

    std::uint16_t u16(std::size_t off) const {
        need(off, 2);
        const auto* p = reinterpret_cast<const unsigned char*>(buf_.data() + off);
        return big_ ? std::uint16_t(p[0] << 8 | p[1]) : std::uint16_t(p[1] << 8 | p[0]);
    }

    std::uint32_t u32(std::size_t off) const {
        need(off, 4);
        const auto* p = reinterpret_cast<const unsigned char*>(buf_.data() + off);
        if (big_)
            return std::uint32_t(p[0]) << 24 | std::uint32_t(p[1]) << 16 |
                   std::uint32_t(p[2]) << 8 | p[3];
        return std::uint32_t(p[3]) << 24 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[1]) << 8 |
               p[0];
    }

    std::string_view bytes(std::size_t off, std::size_t len) const {
        need(off, len);
        return buf_.substr(off, len);
    }

private:
    std::string_view buf_;
    bool big_ = false;
};

struct Entry {
    std::uint16_t tag = 0;
    std::uint16_t type = 0;
    std::uint32_t count = 0;
    std::size_t value_offset = 0;
};

std::vector<std::uint8_t> little_endian_payload(const Reader& rd, const Entry& e) {
    const std::size_t len = type_size(e.type) * e.count;
    auto raw = rd.bytes(e.value_offset, len);
    std::vector<std::uint8_t> out(raw.begin(), raw.end());
    const std::size_t unit = swap_unit(e.type);
    if (rd.big_endian() && unit > 1)
        for (std::size_t i = 0; i + unit <= out.size(); i += unit)
            std::reverse(out.begin() + static_cast<std::ptrdiff_t>(i),
                         out.begin() + static_cast<std::ptrdiff_t>(i + unit));
    return out;
}

std::vector<std::uint64_t> unsigned_values(const Reader& rd, const Entry& e) {
    std::vector<std::uint64_t> out;
    out.reserve(e.count);
    for (std::uint32_t i = 0; i < e.count; ++i) {
        switch (e.type) {
        case kByte: out.push_back(static_cast<unsigned char>(rd.bytes(e.value_offset + i, 1)[0])); break;
        case kShort: out.push_back(rd.u16(e.value_offset + 2 * i)); break;
        case kLong: out.push_back(rd.u32(e.value_offset + 4 * i)); break;
        default: corrupt("tag " + std::to_string(e.tag) + " has non-integer type");
        }
    }
    return out;
}

std::vector<double> le_doubles(const std::vector<std::uint8_t>& bytes) {
    std::vector<double> out(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t bits = 0;
        for (int k = 7; k >= 0; --k) bits = bits << 8 | bytes[i * 8 + static_cast<std::size_t>(k)];
        out[i] = std::bit_cast<double>(bits);
    }
    return out;
}

std::string inflate_strip(std::string_view compressed, std::size_t expected) {
    std::string out(expected, '\0');
    uLongf dest_len = static_cast<uLongf>(expected);
    const int rc = uncompress(reinterpret_cast<Bytef*>(out.data()), &dest_len,
                              reinterpret_cast<const Bytef*>(compressed.data()),
                              static_cast<uLong>(compressed.size()));
    // Z_BUF_ERROR means the stream holds more than one strip's worth; the
    // leading bytes are still valid.
    if (rc != Z_OK && rc != Z_BUF_ERROR) corrupt("deflate stream (zlib code " + std::to_string(rc) + ")");
    if (dest_len < expected) corrupt("deflate strip shorter than expected");
    return out;
}

double decode_sample(const unsigned char* p, DataType dt, bool big) {
    switch (dt) {
    case DataType::U8: return p[0];
    case DataType::U16: return big ? (p[0] << 8 | p[1]) : (p[1] << 8 | p[0]);
    case DataType::F32: {
        std::uint32_t bits = big ? (std::uint32_t(p[0]) << 24 | std::uint32_t(p[1]) << 16 |
                                    std::uint32_t(p[2]) << 8 | p[3])
                                 : (std::uint32_t(p[3]) << 24 | std::uint32_t(p[2]) << 16 |
                                    std::uint32_t(p[1]) << 8 | p[0]);
        return static_cast<double>(std::bit_cast<float>(bits));
    }
    }
    return 0.0;
}

std::size_t sample_bytes(DataType dt) {
    switch (dt) {
    case DataType::U8: return 1;
    case DataType::U16: return 2;
    case DataType::F32: return 4;
    }
    return 0;
}

} // namespace

Raster decode_tiff(std::string_view bytes) {
    Reader rd(bytes);
    const std::size_t ifd = rd.u32(4);
    const std::uint16_t n_entries = rd.u16(ifd);
    rd.need(ifd + 2, std::size_t(n_entries) * 12 + 4);

    std::map<std::uint16_t, Entry> entries;
    for (std::uint16_t i = 0; i < n_entries; ++i) {
        const std::size_t at = ifd + 2 + std::size_t(i) * 12;
        Entry e;
        e.tag = rd.u16(at);
        e.type = rd.u16(at + 2);
        e.count = rd.u32(at + 4);
        const std::size_t tsize = type_size(e.type);
        if (tsize == 0) continue;  // unknown field types are skipped per baseline rules
        const std::size_t len = tsize * e.count;
        e.value_offset = len <= 4 ? at + 8 : rd.u32(at + 8);
        rd.need(e.value_offset, len);
        entries[e.tag] = e;
    }

    auto scalar = [&](std::uint16_t tag, std::optional<std::uint64_t> fallback) -> std::uint64_t {
        auto it = entries.find(tag);
        if (it == entries.end()) {
            if (!fallback) corrupt("missing required tag " + std::to_string(tag));
            return *fallback;
        }
        auto v = unsigned_values(rd, it->second);
        if (v.empty()) corrupt("empty tag " + std::to_string(tag));
        return v.front();
    };
    auto all_same = [&](std::uint16_t tag, std::uint64_t fallback, std::size_t spp) {
        auto it = entries.find(tag);
        if (it == entries.end()) return fallback;
        auto v = unsigned_values(rd, it->second);
        if (v.empty()) corrupt("empty tag " + std::to_string(tag));
        if (v.size() != 1 && v.size() != spp) corrupt("tag " + std::to_string(tag) + " count");
        if (!std::all_of(v.begin(), v.end(), [&](auto x) { return x == v.front(); }))
            unsupported("mixed per-sample values in tag " + std::to_string(tag));
        return v.front();
    };

    if (entries.count(kTileWidth)) unsupported("tiled images");
    const std::size_t width = scalar(kImageWidth, std::nullopt);
    const std::size_t height = scalar(kImageLength, std::nullopt);
    const std::size_t spp = scalar(kSamplesPerPixel, 1);
    if (width == 0 || height == 0 || spp == 0) corrupt("zero dimension");
    if (width > (1u << 20) || height > (1u << 20) || spp > 64) unsupported("oversized image");
    const auto bps = all_same(kBitsPerSample, 1, spp);
    const auto fmt = all_same(kSampleFormat, 1, spp);
    const auto compression = scalar(kCompression, 1);
    const auto planar = scalar(kPlanarConfig, 1);
    const auto predictor = scalar(kPredictor, 1);
    if (predictor != 1) unsupported("predictor " + std::to_string(predictor));
    if (compression != 1 && compression != 8 && compression != 32946)
        unsupported("compression " + std::to_string(compression));
    if (planar != 1 && planar != 2) corrupt("planar configuration");

    DataType dt;
    if (bps == 8 && fmt == 1)
        dt = DataType::U8;
    else if (bps == 16 && fmt == 1)
        dt = DataType::U16;
    else if (bps == 32 && fmt == 3)
        dt = DataType::F32;
    else
        unsupported(std::to_string(bps) + "-bit samples with format " + std::to_string(fmt));

    const std::size_t rows_per_strip = std::min<std::uint64_t>(scalar(kRowsPerStrip, height), height);
    if (rows_per_strip == 0) corrupt("rows per strip is zero");
    if (!entries.count(kStripOffsets) || !entries.count(kStripByteCounts))
        corrupt("missing strip tags");
    const auto offsets = unsigned_values(rd, entries[kStripOffsets]);
    const auto counts = unsigned_values(rd, entries[kStripByteCounts]);
    const std::size_t strips_per_plane = (height + rows_per_strip - 1) / rows_per_strip;
    const std::size_t planes = planar == 2 ? spp : 1;
    if (offsets.size() != strips_per_plane * planes || counts.size() != offsets.size())
        corrupt("strip count does not match image geometry");

    const std::size_t ss = sample_bytes(dt);
    const std::size_t samples_per_row = planar == 2 ? width : width * spp;
    Raster out(width, height, spp, dt);
    auto data = out.data();
    const std::size_t npix = width * height;

    for (std::size_t plane = 0; plane < planes; ++plane) {
        for (std::size_t s = 0; s < strips_per_plane; ++s) {
            const std::size_t idx = plane * strips_per_plane + s;
            const std::size_t row0 = s * rows_per_strip;
            const std::size_t rows = std::min(rows_per_strip, height - row0);
            const std::size_t expected = rows * samples_per_row * ss;
            std::string_view raw = rd.bytes(offsets[idx], counts[idx]);
            std::string inflated;
            if (compression != 1) {
                inflated = inflate_strip(raw, expected);
                raw = inflated;
            }
            if (raw.size() < expected) corrupt("strip " + std::to_string(idx) + " truncated");
            const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t k = 0; k < samples_per_row; ++k) {
                    const double v = decode_sample(p + (r * samples_per_row + k) * ss, dt,
                                                   rd.big_endian());
                    const std::size_t row = row0 + r;
                    if (planar == 2) {
                        data[plane * npix + row * width + k] = v;
                    } else {
                        const std::size_t col = k / spp;
                        const std::size_t band = k % spp;
                        data[band * npix + row * width + col] = v;
                    }
                }
            }
        }
    }

    GeoRef geo;
    for (std::uint16_t id : kGeoTagIds) {
        auto it = entries.find(id);
        if (it == entries.end()) continue;
        geo.tags.push_back({id, it->second.type, it->second.count, little_endian_payload(rd, it->second)});
    }
    {
        auto scale = entries.find(kModelPixelScale);
        auto tie = entries.find(kModelTiepoint);
        if (scale != entries.end() && tie != entries.end() && scale->second.type == kDouble &&
            tie->second.type == kDouble && scale->second.count >= 2 && tie->second.count >= 6) {
            const auto s = le_doubles(little_endian_payload(rd, scale->second));
            const auto t = le_doubles(little_endian_payload(rd, tie->second));
            geo.affine = Affine{t[3] - t[0] * s[0], t[4] + t[1] * s[1], s[0], -s[1]};
        }
    }
    out.set_geo(std::move(geo));

    if (auto it = entries.find(kGdalNodata); it != entries.end() && it->second.type == kAscii) {
        std::string text(rd.bytes(it->second.value_offset, it->second.count));
        text.erase(std::find(text.begin(), text.end(), '\0'), text.end());
        if (!text.empty()) {
            char* end = nullptr;
            const double v = std::strtod(text.c_str(), &end);
            if (end != text.c_str()) out.set_nodata(v);
        }
    }
    return out;
}

namespace {

struct OutEntry {
    std::uint16_t tag;
    std::uint16_t type;
    std::uint32_t count;
    std::vector<std::uint8_t> bytes;
};

void put16(std::vector<std::uint8_t>& v, std::uint16_t x) {
    v.push_back(std::uint8_t(x & 0xff));
    v.push_back(std::uint8_t(x >> 8));
}

void put32(std::vector<std::uint8_t>& v, std::uint32_t x) {
    for (int i = 0; i < 4; ++i) v.push_back(std::uint8_t(x >> (8 * i)));
}

OutEntry shorts(std::uint16_t tag, const std::vector<std::uint16_t>& xs) {
    OutEntry e{tag, kShort, static_cast<std::uint32_t>(xs.size()), {}};
    for (auto x : xs) put16(e.bytes, x);
    return e;
}

OutEntry longs(std::uint16_t tag, const std::vector<std::uint32_t>& xs) {
    OutEntry e{tag, kLong, static_cast<std::uint32_t>(xs.size()), {}};
    for (auto x : xs) put32(e.bytes, x);
    return e;
}

std::string format_nodata(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void encode_sample(std::string& out, double v, DataType dt) {
    switch (dt) {
    case DataType::U8:
        out.push_back(static_cast<char>(std::isnan(v) ? 0 : std::clamp(std::lround(v), 0L, 255L)));
        break;
    case DataType::U16: {
        const auto x = static_cast<std::uint16_t>(std::isnan(v) ? 0 : std::clamp(std::lround(v), 0L, 65535L));
        out.push_back(static_cast<char>(x & 0xff));
        out.push_back(static_cast<char>(x >> 8));
        break;
    }
    case DataType::F32: {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
        break;
    }
    }
}

std::string deflate_strip(const std::string& raw) {
    uLongf len = compressBound(static_cast<uLong>(raw.size()));
    std::string out(len, '\0');
    const int rc = compress2(reinterpret_cast<Bytef*>(out.data()), &len,
                             reinterpret_cast<const Bytef*>(raw.data()),
                             static_cast<uLong>(raw.size()), 6);
    if (rc != Z_OK) throw Error(Errc::WriteFailure, "deflate failed");
    out.resize(len);
    return out;
}

} // namespace

std::string encode_tiff(const Raster& r, WriteOptions opts) {
    const std::size_t w = r.width(), h = r.height(), bands = r.bands();
    const DataType dt = r.dtype();
    const std::uint16_t bits = static_cast<std::uint16_t>(sample_bytes(dt) * 8);
    const std::uint16_t fmt = dt == DataType::F32 ? 3 : 1;
    const bool rgb = bands == 3 && dt == DataType::U8;

    std::vector<std::string> strips;
    strips.reserve(bands);
    for (std::size_t b = 0; b < bands; ++b) {
        std::string raw;
        raw.reserve(w * h * sample_bytes(dt));
        for (double v : r.band(b)) encode_sample(raw, v, dt);
        strips.push_back(opts.compression == Compression::Deflate ? deflate_strip(raw) : std::move(raw));
    }

    std::vector<OutEntry> es;
    es.push_back(longs(kImageWidth, {static_cast<std::uint32_t>(w)}));
    es.push_back(longs(kImageLength, {static_cast<std::uint32_t>(h)}));
    es.push_back(shorts(kBitsPerSample, std::vector<std::uint16_t>(bands, bits)));
    es.push_back(shorts(kCompression, {std::uint16_t(opts.compression == Compression::Deflate ? 8 : 1)}));
    es.push_back(shorts(kPhotometric, {std::uint16_t(rgb ? 2 : 1)}));
    es.push_back(longs(kStripOffsets, std::vector<std::uint32_t>(bands, 0)));
    es.push_back(shorts(kSamplesPerPixel, {static_cast<std::uint16_t>(bands)}));
    es.push_back(longs(kRowsPerStrip, {static_cast<std::uint32_t>(h)}));
    {
        std::vector<std::uint32_t> counts;
        for (const auto& s : strips) counts.push_back(static_cast<std::uint32_t>(s.size()));
        es.push_back(longs(kStripByteCounts, counts));
    }
    es.push_back(shorts(kPlanarConfig, {std::uint16_t(bands > 1 ? 2 : 1)}));
    if (bands > 1 && !rgb)
        es.push_back(shorts(kExtraSamples, std::vector<std::uint16_t>(bands - 1, 0)));
    es.push_back(shorts(kSampleFormat, std::vector<std::uint16_t>(bands, fmt)));
    for (const auto& g : r.geo().tags) es.push_back({g.tag, g.type, g.count, g.bytes});
    if (r.nodata()) {
        std::string text = format_nodata(*r.nodata());
        OutEntry e{kGdalNodata, kAscii, static_cast<std::uint32_t>(text.size() + 1), {}};
        e.bytes.assign(text.begin(), text.end());
        e.bytes.push_back(0);
        es.push_back(std::move(e));
    }
    std::sort(es.begin(), es.end(), [](const OutEntry& a, const OutEntry& b) { return a.tag < b.tag; });

    const std::size_t ifd_size = 2 + es.size() * 12 + 4;
    std::size_t extra = 0;
    for (const auto& e : es)
        if (e.bytes.size() > 4) extra += e.bytes.size() + (e.bytes.size() & 1);
    std::size_t data_at = 8 + ifd_size + extra;
    for (auto& e : es) {
        if (e.tag != kStripOffsets) continue;
        e.bytes.clear();
        for (const auto& s : strips) {
            put32(e.bytes, static_cast<std::uint32_t>(data_at));
            data_at += s.size();
        }
    }
    if (data_at > std::numeric_limits<std::uint32_t>::max())
        throw Error(Errc::WriteFailure, "raster too large for classic TIFF");

    std::vector<std::uint8_t> head{'I', 'I'};
    put16(head, 42);
    put32(head, 8);
    put16(head, static_cast<std::uint16_t>(es.size()));
    std::vector<std::uint8_t> spill;
    const std::size_t spill_at = 8 + ifd_size;
    for (const auto& e : es) {
        put16(head, e.tag);
        put16(head, e.type);
        put32(head, e.count);
        if (e.bytes.size() <= 4) {
            for (std::size_t i = 0; i < 4; ++i) head.push_back(i < e.bytes.size() ? e.bytes[i] : 0);
        } else {
            put32(head, static_cast<std::uint32_t>(spill_at + spill.size()));
            spill.insert(spill.end(), e.bytes.begin(), e.bytes.end());
            if (spill.size() & 1) spill.push_back(0);
        }
    }
    put32(head, 0);

    std::string out(head.begin(), head.end());
    out.append(spill.begin(), spill.end());
    for (const auto& s : strips) out += s;
    return out;
}

void write_tiff(const Raster& r, const std::filesystem::path& path, WriteOptions opts) {
    const std::string bytes = encode_tiff(r, opts);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(Errc::WriteFailure, "cannot open " + path.string() + " for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error(Errc::WriteFailure, "short write to " + path.string());
}

} // namespace geoagent::raster
