// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#include "glint/image.hpp"

#include "glint/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace glint {

Image::Image(int w, int h, const Rgb& fill) : width(w), height(h) {
    pixels.assign(static_cast<size_t>(w) * h, fill);
}

Rgb Image::sample_wrap_clamp(float u, float v) const {
    const float x = u * width - 0.5f;
    const float y = v * height - 0.5f;
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const float fx = x - x0;
    const float fy = y - y0;
    auto wrap_x = [&](int i) {
        i %= width;
        return i < 0 ? i + width : i;
    };
    auto clamp_y = [&](int i) { return std::clamp(i, 0, height - 1); };
    const Rgb& p00 = at(wrap_x(x0), clamp_y(y0));
    const Rgb& p10 = at(wrap_x(x0 + 1), clamp_y(y0));
    const Rgb& p01 = at(wrap_x(x0), clamp_y(y0 + 1));
    const Rgb& p11 = at(wrap_x(x0 + 1), clamp_y(y0 + 1));
    return p00 * (1 - fx) * (1 - fy) + p10 * fx * (1 - fy) + p01 * (1 - fx) * fy +
           p11 * fx * fy;
}

Rgbd Image::mean() const {
    Rgbd acc = Rgbd::Zero();
    for (const Rgb& p : pixels) {
        acc += p.cast<double>();
    }
    return pixels.empty() ? acc : Rgbd(acc / static_cast<double>(pixels.size()));
}

namespace {

// Reads one whitespace-delimited token, skipping single-character separators.
std::string next_token(std::ifstream& in) {
    std::string tok;
    in >> tok;
    return tok;
}

void byteswap_f32(float* data, size_t count) {
    for (size_t i = 0; i < count; ++i) {
        uint32_t v;
        std::memcpy(&v, data + i, 4);
        v = ((v & 0x000000ffu) << 24) | ((v & 0x0000ff00u) << 8) | ((v & 0x00ff0000u) >> 8) |
            ((v & 0xff000000u) >> 24);
        std::memcpy(data + i, &v, 4);
    }
}

constexpr bool kHostLittleEndian = std::endian::native == std::endian::little;

}  // namespace

Image load_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open PFM file: " + path);
    }
    const std::string magic = next_token(in);
    if (magic == "Pf") {
        throw IoError(path + ": grayscale PFM (\"Pf\") is not supported, expected \"PF\"");
    }
    if (magic != "PF") {
        throw IoError(path + ": not a PFM file (bad magic \"" + magic + "\")");
    }
    long w = 0;
    long h = 0;
    double scale = 0.0;
    try {
        w = std::stol(next_token(in));
        h = std::stol(next_token(in));
        scale = std::stod(next_token(in));
    } catch (const std::exception&) {
        throw IoError(path + ": malformed PFM header");
    }
    if (w <= 0 || h <= 0 || scale == 0.0) {
        throw IoError(path + ": invalid PFM dimensions or scale");
    }
    in.get();  // single whitespace byte ends the header
    Image img(static_cast<int>(w), static_cast<int>(h));
    const size_t floats_per_row = static_cast<size_t>(w) * 3;
    std::vector<float> row(floats_per_row);
    // Payload rows run bottom to top.
    for (long y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(floats_per_row * sizeof(float)));
        if (static_cast<size_t>(in.gcount()) != floats_per_row * sizeof(float)) {
            throw IoError(path + ": truncated PFM payload");
        }
        const bool file_little = scale < 0.0;
        if (file_little != kHostLittleEndian) {
            byteswap_f32(row.data(), floats_per_row);
        }
        for (long x = 0; x < w; ++x) {
            img.at(static_cast<int>(x), static_cast<int>(y)) =
                Rgb(row[x * 3 + 0], row[x * 3 + 1], row[x * 3 + 2]);
        }
    }
    return img;
}

void write_pfm(const std::string& path, const Image& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write PFM file: " + path);
    }
    char header[64];
    const double scale = kHostLittleEndian ? -1.0 : 1.0;
    const int n = std::snprintf(header, sizeof(header), "PF\n%d %d\n%.1f\n", img.width,
                                img.height, scale);
    out.write(header, n);
    std::vector<float> row(static_cast<size_t>(img.width) * 3);
    for (int y = img.height - 1; y >= 0; --y) {
        for (int x = 0; x < img.width; ++x) {
            const Rgb& p = img.at(x, y);
            row[x * 3 + 0] = p[0];
            row[x * 3 + 1] = p[1];
            row[x * 3 + 2] = p[2];
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!out) {
        throw IoError("short write on PFM file: " + path);
    }
}

namespace {

uint32_t crc32(const uint8_t* data, size_t len, uint32_t crc = 0) {
    static const auto table = [] {
        std::array<uint32_t, 256> t{};
        for (uint32_t i = 0; i < 256; ++i) {
            uint32_t c = i;
            for (int k = 0; k < 8; ++k) {
                c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            }
            t[i] = c;
        }
        return t;
    }();
    crc ^= 0xffffffffu;
    for (size_t i = 0; i < len; ++i) {
        crc = table[(crc ^ data[i]) & 0xffu] ^ (crc >> 8);
    }
    return crc ^ 0xffffffffu;
}

uint32_t adler32(const uint8_t* data, size_t len) {
    uint32_t a = 1;
    uint32_t b = 0;
    for (size_t i = 0; i < len; ++i) {
        a = (a + data[i]) % 65521u;
        b = (b + a) % 65521u;
    }
    return (b << 16) | a;
}

void put_u32_be(std::vector<uint8_t>& v, uint32_t x) {
    v.push_back(static_cast<uint8_t>(x >> 24));
    v.push_back(static_cast<uint8_t>(x >> 16));
    v.push_back(static_cast<uint8_t>(x >> 8));
    v.push_back(static_cast<uint8_t>(x));
}

void put_chunk(std::vector<uint8_t>& out, const char* type, const std::vector<uint8_t>& data) {
    put_u32_be(out, static_cast<uint32_t>(data.size()));
    const size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    put_u32_be(out, crc32(out.data() + start, out.size() - start));
}

}  // namespace

void write_png(const std::string& path, const Image8& img) {
    // Raw scanlines with filter byte 0.
    std::vector<uint8_t> raw;
    raw.reserve(static_cast<size_t>(img.height) * (1 + static_cast<size_t>(img.width) * 3));
    for (int y = 0; y < img.height; ++y) {
        raw.push_back(0);
        const uint8_t* row = img.rgb.data() + static_cast<size_t>(y) * img.width * 3;
        raw.insert(raw.end(), row, row + static_cast<size_t>(img.width) * 3);
    }

    // zlib stream of stored (uncompressed) deflate blocks.
    std::vector<uint8_t> z;
    z.push_back(0x78);
    z.push_back(0x01);
    size_t off = 0;
    do {
        const size_t n = std::min<size_t>(raw.size() - off, 65535);
        const bool last = off + n == raw.size();
        z.push_back(last ? 1 : 0);
        z.push_back(static_cast<uint8_t>(n & 0xff));
        z.push_back(static_cast<uint8_t>(n >> 8));
        z.push_back(static_cast<uint8_t>(~n & 0xff));
        z.push_back(static_cast<uint8_t>((~n >> 8) & 0xff));
        z.insert(z.end(), raw.begin() + off, raw.begin() + off + n);
        off += n;
    } while (off < raw.size());
    put_u32_be(z, adler32(raw.data(), raw.size()));

    std::vector<uint8_t> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<uint8_t> ihdr;
    put_u32_be(ihdr, static_cast<uint32_t>(img.width));
    put_u32_be(ihdr, static_cast<uint32_t>(img.height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // color type: truecolor
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    put_chunk(png, "IHDR", ihdr);
    put_chunk(png, "IDAT", z);
    put_chunk(png, "IEND", {});

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write PNG file: " + path);
    }
    out.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
    if (!out) {
        throw IoError("short write on PNG file: " + path);
    }
}

}  // namespace glint
