// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "glint/envlight.hpp"
#include "glint/geometry.hpp"
#include "glint/image.hpp"

#include <cstdint>
#include <vector>

namespace glint {

enum class BackgroundMode { Environment, Black };

struct ShadingContext {
    const CubeMipChain* environment = nullptr;
    const DfgLut* lut = nullptr;
    float rho_t = 0.3f;             // roughness threshold of the second split-sum
    bool indirect_enabled = true;   // trace one specular bounce when rho <= rho_t
    BackgroundMode background = BackgroundMode::Environment;
};

// Split-sum shade of one surface point. view_dir is the propagation
// direction (camera to surface).
struct SampleShade {
    Rgb diffuse = Rgb::Zero();   // (1 - m) a l^d(n)
    Rgb specular = Rgb::Zero();  // (F0 F1 + F2) l^s(reflect(view, n), rho)
    Rgb dfg = Rgb::Zero();       // F0 F1 + F2, the specular coefficient alone

    Rgb total() const { return diffuse + specular; }
};
SampleShade shade_sample(const ShadingContext& ctx, const Material& mat, const Vec3f& x,
                         const Vec3f& view_dir, const Vec3f& normal);

/// Relighting adjustment of the specular light integral: l^s when
/// rho > rho_t, else (1 - O) l^s + O L_ind.
Rgb relight_light_integral(const ShadingContext& ctx, float rho, float occlusion, const Rgb& l_s,
                           const Rgb& l_ind);

// Material-independent per-pixel trace: the primary march plus, when
// traced, the secondary (reflected) march used by the second split-sum.
// Caching these makes material re-shading cheap for the inverse solver.
struct PixelGeometry {
    Vec3f ray_dir = Vec3f::Zero();
    RayMarchResult primary;

    bool secondary_traced = false;
    Vec3f secondary_dir = Vec3f::Zero();   // reflect_dir(ray_dir, N)
    float secondary_opacity = 0.0f;        // O2
    bool secondary_hit = false;            // secondary march not degenerate
    Vec3f secondary_point = Vec3f::Zero(); // x_hat'
    Vec3f secondary_normal = Vec3f::Zero();
    int secondary_primitive = -1;
};

// Secondary rays start eps = 1e-3 * bound_radius along N off the expected
// intersection. force_secondary traces whenever opacity permits, regardless
// of the roughness indicator (used when materials may change after
// tracing).
PixelGeometry trace_pixel(const ShadingContext& ctx, const SdfScene& scene, const Ray& ray,
                          Rng* rng, bool force_secondary = false);

struct PixelShade {
    Rgb color = Rgb::Zero();
    Rgb diffuse = Rgb::Zero();    // volume-rendered C_d
    Rgb specular = Rgb::Zero();   // volume-rendered specular after relighting
    float rho = 0.0f;             // opacity-normalized volume-rendered roughness
    float opacity = 0.0f;
    Vec3f normal = Vec3f::Zero();
};

/// Shades a traced pixel; `overrides` (per-primitive) substitutes the base
/// materials when non-null.
PixelShade shade_pixel(const ShadingContext& ctx, const SdfScene& scene,
                       const PixelGeometry& geom, const Material* overrides = nullptr);

/// Full pipeline for one primary ray.
Rgb render_pixel(const ShadingContext& ctx, const SdfScene& scene, const Ray& ray, Rng* rng);

struct RenderOutput {
    Image color;
    Image normal;   // raw N; zero on background pixels
    Image rough;    // opacity-normalized roughness in all channels
    Image opacity;  // O in all channels
};

// Deterministic for fixed seed under any thread count; pixel rays are
// jittered per-pixel with seed mix(seed, pixel index).
RenderOutput render_image(const ShadingContext& ctx, const SdfScene& scene, int width, int height,
                          uint64_t seed, int n_threads = 0);

/// Clamp to [0,1], gamma 1/2.2, round half up to 8 bits.
Image8 tone_map_srgb(const Image& hdr);

}  // namespace glint
