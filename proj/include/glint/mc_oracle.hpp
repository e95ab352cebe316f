// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "glint/envlight.hpp"
#include "glint/geometry.hpp"
#include "glint/image.hpp"

#include <cstdint>
#include <optional>

namespace glint {

struct McConfig {
    int spp = 4096;
    int max_bounces = 1;  // 1: environment only, 2: one traced specular bounce
    uint64_t seed = 0;
};

// Unbiased estimate of the direct rendering integral at a surface point.
// One-sample balance-heuristic MIS between the cosine lobe and the GGX
// half-vector lobe; the environment is queried at the base mip level.
struct DirectEstimate {
    Rgb diffuse = Rgb::Zero();
    Rgb specular = Rgb::Zero();

    Rgb total() const { return diffuse + specular; }
};
DirectEstimate estimate_direct_parts(const Material& mat, const Vec3f& x, const Vec3f& view_dir,
                                     const Vec3f& normal, const CubeMipChain& env,
                                     const McConfig& cfg);
Rgb estimate_direct(const Material& mat, const Vec3f& x, const Vec3f& view_dir,
                    const Vec3f& normal, const CubeMipChain& env, const McConfig& cfg);

/// Sphere-traces to the zero level set (bisection-refined to |s| < 1e-5).
/// Empty optional on a miss or a non-convergent march.
std::optional<float> sphere_trace(const SdfScene& scene, const Vec3f& origin, const Vec3f& dir);

// Surface-based reference tracer: estimate_direct at the first hit plus,
// with max_bounces = 2, a one-GGX-sample correction that swaps environment
// light for traced surface radiance along occluded reflection directions.
Rgb path_trace(const SdfScene& scene, const Ray& ray, const CubeMipChain& env,
               const McConfig& cfg);

/// Per-pixel reference images (deterministic per seed, pixel-seeded).
Image mc_render_direct(const SdfScene& scene, const CubeMipChain& env, const McConfig& cfg,
                       int width, int height, int n_threads = 0);
Image mc_render_path(const SdfScene& scene, const CubeMipChain& env, const McConfig& cfg,
                     int width, int height, int n_threads = 0);

// Pixelwise squared-error map (channel mean, stored in all channels) and
// PSNR = 10 log10(1 / MSE) of the [0,1]-clamped images; 99 when MSE = 0.
struct ErrorMap {
    Image l2_map;
    double psnr = 0.0;
};
ErrorMap error_map(const Image& a, const Image& b);

}  // namespace glint
