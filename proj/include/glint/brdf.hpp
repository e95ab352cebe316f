// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "glint/math.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace glint {

/// Smallest representable roughness; keeps the GGX lobe off its delta limit.
inline constexpr float kMinRoughness = 0.01f;

/// Disney remap from perceptual roughness to the GGX slope parameter.
template <typename S>
inline S ggx_alpha(S roughness) {
    return roughness * roughness;
}

// Per-point surface material: rgb albedo, perceptual roughness, metallic.
// All fields are clamped to their valid ranges on construction.
struct Material {
    Rgb albedo = Rgb(0.5f, 0.5f, 0.5f);
    float roughness = 0.5f;
    float metallic = 0.0f;

    Material() = default;
    Material(const Rgb& a, float rho, float m);
};

/// GGX normal distribution; alpha in (0, 1], cos_theta_h in [0, 1].
template <typename S>
S ggx_ndf(S alpha, S cos_theta_h);

/// Separable Smith shadowing with the Schlick-GGX k = alpha / 2 remap.
template <typename S>
inline S smith_g1(S alpha, S cos_theta) {
    const S k = alpha / S(2);
    const S denom = cos_theta * (S(1) - k) + k;
    return denom > S(0) ? cos_theta / denom : S(0);
}

template <typename S>
inline S smith_g(S alpha, S n_dot_v, S n_dot_l) {
    return smith_g1(alpha, saturate(n_dot_v)) * smith_g1(alpha, saturate(n_dot_l));
}

/// Schlick Fresnel, per channel: F0 + (1 - F0) (1 - cos)^5.
template <typename Derived>
inline auto fresnel_schlick(const Eigen::ArrayBase<Derived>& f0,
                            typename Derived::Scalar cos_term) {
    using S = typename Derived::Scalar;
    return (f0 + (S(1) - f0) * pow5(S(1) - saturate(cos_term))).eval();
}

/// Base reflectance F0 = 0.04 (1 - m) + m a.
template <typename Derived>
inline auto base_reflectance(typename Derived::Scalar metallic,
                             const Eigen::ArrayBase<Derived>& albedo) {
    using S = typename Derived::Scalar;
    return (S(0.04) * (S(1) - metallic) + metallic * albedo).eval();
}

// Full BRDF of the shading model: Lambert diffuse scaled by (1 - metallic)
// plus a GGX microfacet lobe. view_dir points from the camera into the
// scene; light_dir points from the surface toward the light.
struct BrdfParts {
    Rgb diffuse = Rgb::Zero();
    Rgb specular = Rgb::Zero();

    Rgb total() const { return diffuse + specular; }
};
BrdfParts eval_brdf_parts(const Material& mat, const Vec3f& view_dir, const Vec3f& light_dir,
                          const Vec3f& normal);
Rgb eval_brdf(const Material& mat, const Vec3f& view_dir, const Vec3f& light_dir,
              const Vec3f& normal);

template <typename S>
struct GgxSample {
    Vec3<S> half_vector;
    S pdf;  // density over half-vectors, D(cos_theta_h) * cos_theta_h
};

/// GGX half-vector importance sample around `normal` from uniforms (u1, u2).
template <typename S>
GgxSample<S> sample_ggx(S alpha, const Vec3<S>& normal, S u1, S u2);

// Pre-integrated specular BSDF table. Entry (i, j) holds the pair
// (F1, F2) at roughness row i and view-cosine column j, so that
// integral(f_s (n.w)) = F0 * F1 + F2. Grid: n.d column j = j / (R - 1),
// roughness row i = rho_min + (1 - rho_min) i / (R - 1).
struct DfgLut {
    int resolution = 0;
    int bake_samples = 0;
    std::vector<float> data;  // R * R * 2, row-major, n.d fastest

    float f1(int rho_idx, int nd_idx) const {
        return data[(static_cast<size_t>(rho_idx) * resolution + nd_idx) * 2];
    }
    float f2(int rho_idx, int nd_idx) const {
        return data[(static_cast<size_t>(rho_idx) * resolution + nd_idx) * 2 + 1];
    }
    float grid_n_dot_d(int j) const { return static_cast<float>(j) / (resolution - 1); }
    float grid_roughness(int i) const {
        return kMinRoughness + (1.0f - kMinRoughness) * static_cast<float>(i) / (resolution - 1);
    }
};

// Monte Carlo bakes the two Fresnel-factored specular integrals per grid
// entry. Deterministic for a fixed seed under any thread count. Throws
// UsageError on bad sizes and a bake error naming the entry if an invariant
// (values in [0,1], F1 + F2 <= 1 + 1e-2) fails.
DfgLut bake_dfg_lut(int resolution, int samples_per_entry, uint64_t seed, int n_threads = 0);

/// Bilinear LUT read; coordinates are clamped to the table range.
std::pair<float, float> lookup_dfg(const DfgLut& lut, float n_dot_d, float rho);

// LUT cache file: magic "DFGL", version byte 1, little-endian u32
// resolution, then R*R*2 little-endian f32 (F1, F2) pairs, n.d fastest.
void save_dfg_lut(const std::string& path, const DfgLut& lut);
DfgLut load_dfg_lut(const std::string& path);

// template implementations

template <typename S>
S ggx_ndf(S alpha, S cos_theta_h) {
    if (!(alpha > S(0))) {
        throw std::invalid_argument("ggx_ndf: alpha must be positive");
    }
    const S a2 = alpha * alpha;
    const S c2 = cos_theta_h * cos_theta_h;
    // c2 (a2 - 1) + 1 rewritten cancellation-free; keeps tiny alpha finite
    const S f = c2 * a2 + (S(1) - c2);
    return a2 / (S(kPi) * f * f);
}

template <typename S>
GgxSample<S> sample_ggx(S alpha, const Vec3<S>& normal, S u1, S u2) {
    // theta_h = atan(alpha sqrt(u1 / (1 - u1))), phi = 2 pi u2; the
    // denominator is grouped to avoid cancellation at small alpha
    const S cos2 = (S(1) - u1) / ((S(1) - u1) + alpha * alpha * u1);
    const S cos_theta = std::sqrt(cos2);
    const S sin_theta = std::sqrt(std::max(S(1) - cos2, S(0)));
    const S phi = S(2) * S(kPi) * u2;
    const Vec3<S> local(sin_theta * std::cos(phi), sin_theta * std::sin(phi), cos_theta);
    const auto [t, b] = orthonormal_basis(normal);
    Vec3<S> h = (local.x() * t + local.y() * b + local.z() * normal).normalized();
    return {h, ggx_ndf(alpha, cos_theta) * cos_theta};
}

}  // namespace glint
