// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "glint/image.hpp"
#include "glint/math.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace glint {

// One cube-map level: six square faces ordered +x, -x, +y, -y, +z, -z.
// Texel (u, v) in [0,1]^2 maps to the standard cube basis with v growing
// downward (see cube_texel_dir).
struct CubeMap {
    int size = 0;
    std::array<std::vector<Rgb>, 6> faces;

    explicit CubeMap(int s = 0, const Rgb& fill = Rgb::Zero());
    Rgb& at(int face, int x, int y) { return faces[face][static_cast<size_t>(y) * size + x]; }
    const Rgb& at(int face, int x, int y) const {
        return faces[face][static_cast<size_t>(y) * size + x];
    }
    /// Mean radiance over the sphere (texels weighted by solid angle).
    Rgbd mean() const;
};

/// Solid angle subtended by one texel of a size x size cube face.
double cube_texel_solid_angle(int size, int x, int y);

/// World direction of face texel coordinates (u, v) in [0,1]^2 (unnormalized input ok).
Vec3f cube_texel_dir(int face, float u, float v);

/// Inverse of cube_texel_dir: face index plus in-face (u, v).
void dir_to_cube_face(const Vec3f& dir, int& face, float& u, float& v);

/// Bilinear cube read; the u/v taps clamp to the face edge.
Rgb sample_cube(const CubeMap& cube, const Vec3f& dir);

// GGX-prefiltered environment pyramid. Level l has face size
// max(face_size >> l, 1) and roughness rho_l spaced linearly from
// kMinRoughness to 1.
struct CubeMipChain {
    int face_size = 0;
    std::vector<CubeMap> levels;

    int level_count() const { return static_cast<int>(levels.size()); }
    float level_roughness(int level) const;
};

/// Resamples an equirectangular radiance map (top row = +90 deg latitude)
/// onto a cube-map base level.
CubeMap equirect_to_cube(const Image& img, int face_size);

// Builds the mip chain: every level is a GGX convolution of the base,
// importance-sampling `samples_per_texel` directions around each texel
// direction (used as both normal and reflection vector), weighted by the
// clamped cosine and renormalized so constants are preserved.
CubeMipChain prefilter(const CubeMap& base, int levels, int samples_per_texel, uint64_t seed,
                       int n_threads = 0);

/// The specular light integral l^s: bilinear within faces, linear between
/// the two mip levels bracketing rho.
Rgb sample_mip(const CubeMipChain& chain, const Vec3f& dir, float rho);

/// The diffuse light integral l^d = sample_mip(normal, rho_max).
Rgb diffuse_irradiance(const CubeMipChain& chain, const Vec3f& normal);

// Mip-chain cache file: magic "CMIP", version byte 1, u32 face_size,
// u32 levels, then per level six faces of f32 rgb, little-endian.
void save_cmip(const std::string& path, const CubeMipChain& chain);
CubeMipChain load_cmip(const std::string& path);

}  // namespace glint
