// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#include "glint/shading.hpp"

#include "glint/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace glint {

namespace {

constexpr float kBackgroundOpacity = 0.01f;  // below this a pixel is pure background

Rgb background_radiance(const ShadingContext& ctx, const Vec3f& dir) {
    if (ctx.background == BackgroundMode::Black) {
        return Rgb::Zero();
    }
    return sample_mip(*ctx.environment, dir, kMinRoughness);
}

}  // namespace

SampleShade shade_sample(const ShadingContext& ctx, const Material& mat, const Vec3f& x,
                         const Vec3f& view_dir, const Vec3f& normal) {
    (void)x;  // shading is positionless under a distant environment
    SampleShade out;
    out.diffuse = (1.0f - mat.metallic) * mat.albedo *
                  diffuse_irradiance(*ctx.environment, normal).array();

    const float n_dot_d = saturate(normal.dot(-view_dir));
    const auto [f1, f2] = lookup_dfg(*ctx.lut, n_dot_d, mat.roughness);
    out.dfg = base_reflectance(mat.metallic, mat.albedo) * f1 + f2;
    const Vec3f refl = reflect_dir(view_dir, normal);
    out.specular = out.dfg * sample_mip(*ctx.environment, refl, mat.roughness).array();
    return out;
}

Rgb relight_light_integral(const ShadingContext& ctx, float rho, float occlusion, const Rgb& l_s,
                           const Rgb& l_ind) {
    if (rho > ctx.rho_t) {
        return l_s;
    }
    return (1.0f - occlusion) * l_s + occlusion * l_ind;
}

PixelGeometry trace_pixel(const ShadingContext& ctx, const SdfScene& scene, const Ray& ray,
                          Rng* rng, bool force_secondary) {
    PixelGeometry geom;
    geom.ray_dir = ray.dir;
    geom.primary = march_ray(scene, ray.origin, ray.dir, scene.march, rng);
    const RayMarchResult& pm = geom.primary;
    if (pm.opacity < kBackgroundOpacity || !ctx.indirect_enabled) {
        return geom;
    }

    if (!force_secondary) {
        // With the scene's own materials the roughness indicator is already
        // decidable here; skip the secondary march when it cannot apply.
        double w_sum = 0.0;
        double rho_sum = 0.0;
        for (const SurfaceSample& s : pm.surface) {
            w_sum += s.weight;
            rho_sum += static_cast<double>(s.weight) *
                       material_at(scene, s.primitive, s.position).roughness;
        }
        const float rho = static_cast<float>(rho_sum / std::max(w_sum, 1e-6));
        if (rho > ctx.rho_t) {
            return geom;
        }
    }

    geom.secondary_traced = true;
    geom.secondary_dir = reflect_dir(ray.dir, pm.expected_normal);
    const Vec3f origin =
        pm.expected_point + 1e-3f * scene.bound_radius * pm.expected_normal;
    MarchConfig cfg = scene.march;
    cfg.near = 0.0f;
    const RayMarchResult secondary = march_ray(scene, origin, geom.secondary_dir, cfg, rng);
    geom.secondary_opacity = secondary.opacity;
    geom.secondary_hit = !secondary.degenerate;
    if (geom.secondary_hit) {
        geom.secondary_point = secondary.expected_point;
        geom.secondary_normal = secondary.expected_normal;
        geom.secondary_primitive = sdf_distance(scene, geom.secondary_point).primitive;
    }
    return geom;
}

PixelShade shade_pixel(const ShadingContext& ctx, const SdfScene& scene,
                       const PixelGeometry& geom, const Material* overrides) {
    PixelShade out;
    const RayMarchResult& pm = geom.primary;
    out.opacity = pm.opacity;
    if (pm.opacity < kBackgroundOpacity) {
        out.color = background_radiance(ctx, geom.ray_dir);
        return out;
    }
    out.normal = pm.expected_normal;

    Rgbd c_d = Rgbd::Zero();
    Rgbd c_s = Rgbd::Zero();
    Rgbd dfg_sum = Rgbd::Zero();
    double rho_sum = 0.0;
    double w_sum = 0.0;
    for (const SurfaceSample& s : pm.surface) {
        const Material mat = material_at(scene, s.primitive, s.position, overrides);
        const SampleShade shade = shade_sample(ctx, mat, s.position, geom.ray_dir, s.normal);
        c_d += (s.weight * shade.diffuse).cast<double>();
        c_s += (s.weight * shade.specular).cast<double>();
        dfg_sum += (s.weight * shade.dfg).cast<double>();
        rho_sum += static_cast<double>(s.weight) * mat.roughness;
        w_sum += s.weight;
    }
    out.rho = static_cast<float>(rho_sum / std::max(w_sum, 1e-6));
    out.diffuse = c_d.cast<float>();
    out.specular = c_s.cast<float>();

    if (ctx.indirect_enabled && geom.secondary_traced && out.rho <= ctx.rho_t) {
        Rgb l_ind = Rgb::Zero();
        if (geom.secondary_hit && geom.secondary_primitive >= 0) {
            const Material mat =
                material_at(scene, geom.secondary_primitive, geom.secondary_point, overrides);
            l_ind = shade_sample(ctx, mat, geom.secondary_point, geom.secondary_dir,
                                 geom.secondary_normal)
                        .total();
        }
        // Per-sample light integrals share the pixel's occlusion blend, so
        // the relit specular reduces to a blend of the aggregate with the
        // DFG-weighted indirect radiance.
        out.specular = (1.0f - geom.secondary_opacity) * out.specular +
                       geom.secondary_opacity * dfg_sum.cast<float>().array() * l_ind;
    }

    out.color = out.diffuse + out.specular +
                (1.0f - pm.opacity) * background_radiance(ctx, geom.ray_dir);
    return out;
}

Rgb render_pixel(const ShadingContext& ctx, const SdfScene& scene, const Ray& ray, Rng* rng) {
    const PixelGeometry geom = trace_pixel(ctx, scene, ray, rng);
    return shade_pixel(ctx, scene, geom).color;
}

RenderOutput render_image(const ShadingContext& ctx, const SdfScene& scene, int width, int height,
                          uint64_t seed, int n_threads) {
    RenderOutput out{Image(width, height), Image(width, height), Image(width, height),
                     Image(width, height)};
    parallel_for(
        static_cast<size_t>(width) * height,
        [&](size_t idx) {
            const int px = static_cast<int>(idx) % width;
            const int py = static_cast<int>(idx) / width;
            Rng rng(mix_seed(seed, idx));
            const Ray ray = camera_ray(scene.camera, px, py, width, height);
            const PixelGeometry geom = trace_pixel(ctx, scene, ray, &rng);
            const PixelShade shade = shade_pixel(ctx, scene, geom);
            out.color.pixels[idx] = shade.color;
            const bool surface = shade.opacity >= kBackgroundOpacity;
            out.normal.pixels[idx] =
                surface ? Rgb(shade.normal.x(), shade.normal.y(), shade.normal.z()) : Rgb::Zero();
            out.rough.pixels[idx] = Rgb::Constant(surface ? shade.rho : 0.0f);
            out.opacity.pixels[idx] = Rgb::Constant(shade.opacity);
        },
        n_threads);
    return out;
}

Image8 tone_map_srgb(const Image& hdr) {
    Image8 out;
    out.width = hdr.width;
    out.height = hdr.height;
    out.rgb.resize(static_cast<size_t>(hdr.width) * hdr.height * 3);
    for (size_t i = 0; i < hdr.pixels.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            const float v = std::pow(saturate(hdr.pixels[i][c]), 1.0f / 2.2f);
            out.rgb[i * 3 + c] = static_cast<uint8_t>(std::floor(255.0f * v + 0.5f));
        }
    }
    return out;
}

}  // namespace glint
