// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "glint/math.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace glint {

// Linear rgb float image, row-major with the top row first. Used both for
// framebuffers and for equirectangular radiance maps (top row = +90 deg
// latitude).
struct Image {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;

    Image() = default;
    Image(int w, int h, const Rgb& fill = Rgb::Zero());

    Rgb& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    const Rgb& at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }

    /// Bilinear sample at continuous pixel coordinates; u wraps, v clamps.
    Rgb sample_wrap_clamp(float u, float v) const;

    Rgbd mean() const;
};

struct Image8 {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> rgb;  // 3 bytes per pixel, row-major top-first
};

// Portable Float Map, color variant ("PF"). Scanlines are stored bottom-up
// per the format convention; the in-memory image is top-first. A negative
// scale marks little-endian payloads.
Image load_pfm(const std::string& path);
void write_pfm(const std::string& path, const Image& img);

/// Uncompressed 8-bit RGB PNG (stored deflate blocks, byte-deterministic).
void write_png(const std::string& path, const Image8& img);

}  // namespace glint
