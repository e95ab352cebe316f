// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "glint/brdf.hpp"
#include "glint/math.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace glint {

enum class PrimitiveKind { Sphere, Box, Plane, Torus };

// Two-tone checker on albedo: the alternate color is used where
// floor(x/scale) + floor(y/scale) + floor(z/scale) is odd (in the
// primitive's local frame).
struct Checker {
    Rgb albedo_alt = Rgb(0.1f, 0.1f, 0.1f);
    float scale = 0.5f;
};

struct Primitive {
    PrimitiveKind kind = PrimitiveKind::Sphere;
    Vec3f center = Vec3f::Zero();
    float radius = 1.0f;               // sphere
    Vec3f half_extent = Vec3f::Ones(); // box
    Vec3f plane_normal = Vec3f(0, 1, 0);
    float plane_offset = 0.0f;         // plane: dot(n, p) - offset
    float major_radius = 1.0f;         // torus, axis +y
    float minor_radius = 0.25f;
    Material material;
    std::optional<Checker> checker;

    /// Signed distance in world space (center-translated primitives).
    float distance(const Vec3f& p) const;
};

struct MarchConfig {
    float near = 0.05f;
    float far = 8.0f;
    int samples = 128;
};

struct Camera {
    Vec3f position = Vec3f(0, 0, 3);
    Vec3f look_at = Vec3f::Zero();
    Vec3f up = Vec3f(0, 1, 0);
    float fov_deg = 45.0f;  // vertical field of view
};

struct Ray {
    Vec3f origin;
    Vec3f dir;  // unit
};

/// Primary ray through pixel center (px, py) of a width x height image.
Ray camera_ray(const Camera& cam, int px, int py, int width, int height);

// Union of analytic signed-distance primitives plus the NeuS sharpness
// sigma (inverse standard deviation of the S-density).
struct SdfScene {
    float sigma = 500.0f;
    float bound_radius = 5.0f;  // scene scale for epsilon choices
    Camera camera;
    MarchConfig march;
    std::vector<Primitive> primitives;

    int primitive_count() const { return static_cast<int>(primitives.size()); }
};

struct SdfHit {
    float distance = std::numeric_limits<float>::infinity();
    int primitive = -1;  // -1: empty scene
};

/// min over primitives (union CSG) with the minimizer's index.
SdfHit sdf_distance(const SdfScene& scene, const Vec3f& x);

/// True where the checker pattern selects the alternate albedo.
bool checker_alt(const Primitive& prim, const Vec3f& x);

/// Point-evaluated material of the closest primitive (default material on
/// an empty scene). Optionally pass materials overriding the per-primitive
/// base materials (checker patterns still apply).
Material material_at(const SdfScene& scene, int primitive, const Vec3f& x,
                     const Material* overrides = nullptr);
std::pair<float, Material> sdf_eval(const SdfScene& scene, const Vec3f& x);

/// Central-difference SDF normal, step 1e-4 * bound_radius. Empty optional
/// on a vanishing gradient; the caller substitutes -ray_dir.
std::optional<Vec3f> normal_at(const SdfScene& scene, const Vec3f& x);

// NeuS opacity of one ray section from the SDF at its endpoints:
// max((Phi(sigma s_i) - Phi(sigma s_next)) / Phi(sigma s_i), 0) with Phi
// the logistic CDF. Stable for large |sigma s|.
float neus_alpha(float s_i, float s_next, float sigma);

/// Mirror reflection of propagation direction d about normal n,
/// -2 (d.n) n + d, renormalized.
Vec3f reflect_dir(const Vec3f& d, const Vec3f& n);

// One shadeable sample along a marched ray (weight above 1e-6): geometry
// plus which primitive/albedo tone to shade with.
struct SurfaceSample {
    float t = 0.0f;
    float weight = 0.0f;
    Vec3f position = Vec3f::Zero();
    Vec3f normal = Vec3f::Zero();
    int primitive = -1;
};

struct RayMarchResult {
    std::vector<float> depths;      // t_i, size n
    std::vector<float> sdf_values;  // s_i, size n
    std::vector<float> alphas;      // size n - 1
    std::vector<float> weights;     // size n - 1

    float opacity = 0.0f;          // O = sum w_i
    float expected_depth = 0.0f;   // T
    Vec3f expected_normal = Vec3f::Zero();  // N, unit when opacity > 1e-3
    Vec3f expected_point = Vec3f::Zero();   // x_hat = o + T d
    bool degenerate = false;       // O <= 1e-3: T = far, N = -dir

    std::vector<SurfaceSample> surface;
};

// Marches [near, far] with stratified depths (midpoints when rng is null),
// evaluates the SDF at section endpoints, accumulates transmittance-product
// weights and the volume-rendered aggregates.
RayMarchResult march_ray(const SdfScene& scene, const Vec3f& origin, const Vec3f& dir,
                         const MarchConfig& cfg, Rng* rng = nullptr);

}  // namespace glint
