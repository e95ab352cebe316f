// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#include "glint/mc_oracle.hpp"

#include "glint/brdf.hpp"
#include "glint/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace glint {

namespace {

Rgb env_radiance(const CubeMipChain& env, const Vec3f& dir) {
    return sample_mip(env, dir, kMinRoughness);
}

Vec3f cosine_sample(const Vec3f& n, float u1, float u2) {
    const float cos_theta = std::sqrt(1.0f - u1);
    const float sin_theta = std::sqrt(u1);
    const float phi = 2.0f * static_cast<float>(kPi) * u2;
    const auto [t, b] = orthonormal_basis(n);
    return (sin_theta * std::cos(phi) * t + sin_theta * std::sin(phi) * b + cos_theta * n)
        .normalized();
}

float cosine_pdf(const Vec3f& n, const Vec3f& w) {
    return std::max(n.dot(w), 0.0f) / static_cast<float>(kPi);
}

// Light-direction density of GGX half-vector sampling, D (n.h) / (4 (v.h)).
float ggx_light_pdf(float alpha, const Vec3f& n, const Vec3f& v, const Vec3f& w) {
    const Vec3f h = (v + w).normalized();
    const float n_dot_h = saturate(n.dot(h));
    const float v_dot_h = std::max(v.dot(h), 1e-6f);
    return ggx_ndf(alpha, n_dot_h) * n_dot_h / (4.0f * v_dot_h);
}

// One balance-heuristic MIS sample of the direct integral. Returns the
// brdf-part-weighted contributions so diffuse and specular can be reported
// separately.
DirectEstimate direct_sample(const Material& mat, const Vec3f& view_dir, const Vec3f& n,
                             const CubeMipChain& env, Rng& rng) {
    const Vec3f v = -view_dir;
    const float alpha = ggx_alpha(mat.roughness);
    Vec3f w;
    if (rng.uniform() < 0.5f) {
        w = cosine_sample(n, rng.uniform(), rng.uniform());
    } else {
        const Vec3f h = sample_ggx(alpha, n, rng.uniform(), rng.uniform()).half_vector;
        w = (2.0f * v.dot(h) * h - v).normalized();
    }
    DirectEstimate out;
    if (n.dot(w) <= 0.0f || v.dot(n) <= 0.0f) {
        return out;
    }
    const float pdf = 0.5f * cosine_pdf(n, w) + 0.5f * ggx_light_pdf(alpha, n, v, w);
    if (pdf <= 1e-12f) {
        return out;
    }
    const BrdfParts f = eval_brdf_parts(mat, view_dir, w, n);
    const Rgb li = env_radiance(env, w);
    const float scale = n.dot(w) / pdf;
    out.diffuse = f.diffuse * li * scale;
    out.specular = f.specular * li * scale;
    return out;
}

}  // namespace

DirectEstimate estimate_direct_parts(const Material& mat, const Vec3f& x, const Vec3f& view_dir,
                                     const Vec3f& normal, const CubeMipChain& env,
                                     const McConfig& cfg) {
    (void)x;
    Rng rng(cfg.seed);
    Rgbd diffuse = Rgbd::Zero();
    Rgbd specular = Rgbd::Zero();
    for (int s = 0; s < cfg.spp; ++s) {
        const DirectEstimate one = direct_sample(mat, view_dir, normal, env, rng);
        diffuse += one.diffuse.cast<double>();
        specular += one.specular.cast<double>();
    }
    DirectEstimate out;
    out.diffuse = (diffuse / cfg.spp).cast<float>();
    out.specular = (specular / cfg.spp).cast<float>();
    return out;
}

Rgb estimate_direct(const Material& mat, const Vec3f& x, const Vec3f& view_dir,
                    const Vec3f& normal, const CubeMipChain& env, const McConfig& cfg) {
    return estimate_direct_parts(mat, x, view_dir, normal, env, cfg).total();
}

std::optional<float> sphere_trace(const SdfScene& scene, const Vec3f& origin, const Vec3f& dir) {
    const float far = scene.march.far;
    float t = std::max(scene.march.near, 0.0f);
    float prev_t = t;
    float prev_d = sdf_distance(scene, origin + t * dir).distance;
    if (prev_d < 0.0f) {
        return t;  // started inside
    }
    for (int iter = 0; iter < 512; ++iter) {
        t += std::max(prev_d, 1e-5f * scene.bound_radius);
        if (t > far) {
            return std::nullopt;
        }
        const float d = sdf_distance(scene, origin + t * dir).distance;
        if (d < 0.0f) {
            // bracketed the zero level; bisect to |s| < 1e-5
            float lo = prev_t;
            float hi = t;
            for (int k = 0; k < 64; ++k) {
                const float mid = 0.5f * (lo + hi);
                const float dm = sdf_distance(scene, origin + mid * dir).distance;
                if (std::abs(dm) < 1e-5f) {
                    return mid;
                }
                (dm > 0.0f ? lo : hi) = mid;
            }
            return 0.5f * (lo + hi);
        }
        if (d < 1e-5f) {
            return t;
        }
        prev_t = t;
        prev_d = d;
    }
    return std::nullopt;  // non-convergent march
}

namespace {

struct SurfaceHit {
    Vec3f position;
    Vec3f normal;
    Material material;
};

std::optional<SurfaceHit> first_hit(const SdfScene& scene, const Vec3f& origin, const Vec3f& dir) {
    const auto t = sphere_trace(scene, origin, dir);
    if (!t) {
        return std::nullopt;
    }
    SurfaceHit hit;
    hit.position = origin + *t * dir;
    const auto n = normal_at(scene, hit.position);
    hit.normal = n ? *n : Vec3f(-dir);
    hit.material = sdf_eval(scene, hit.position).second;
    return hit;
}

}  // namespace

Rgb path_trace(const SdfScene& scene, const Ray& ray, const CubeMipChain& env,
               const McConfig& cfg) {
    const auto hit = first_hit(scene, ray.origin, ray.dir);
    if (!hit) {
        return env_radiance(env, ray.dir);
    }
    const float alpha = ggx_alpha(hit->material.roughness);
    const float eps = 1e-3f * scene.bound_radius;
    Rng rng(cfg.seed);
    Rgbd acc = Rgbd::Zero();
    for (int s = 0; s < cfg.spp; ++s) {
        Rgb sample = direct_sample(hit->material, ray.dir, hit->normal, env, rng).total();
        if (cfg.max_bounces >= 2) {
            // Replace environment light with traced surface radiance along
            // one occluded GGX reflection direction.
            const Vec3f v = -ray.dir;
            const Vec3f h =
                sample_ggx(alpha, hit->normal, rng.uniform(), rng.uniform()).half_vector;
            const Vec3f w = (2.0f * v.dot(h) * h - v).normalized();
            const float n_dot_w = hit->normal.dot(w);
            if (n_dot_w > 0.0f) {
                const auto second =
                    first_hit(scene, hit->position + eps * hit->normal, w);
                if (second) {
                    const Rgb l_surface =
                        direct_sample(second->material, w, second->normal, env, rng).total();
                    const Rgb l_env = env_radiance(env, w);
                    const float pdf = ggx_light_pdf(alpha, hit->normal, v, w);
                    if (pdf > 1e-12f) {
                        const Rgb f_s =
                            eval_brdf_parts(hit->material, ray.dir, w, hit->normal).specular;
                        sample += f_s * (l_surface - l_env) * (n_dot_w / pdf);
                    }
                }
            }
        }
        acc += sample.cast<double>();
    }
    return (acc / cfg.spp).cast<float>();
}

Image mc_render_direct(const SdfScene& scene, const CubeMipChain& env, const McConfig& cfg,
                       int width, int height, int n_threads) {
    Image img(width, height);
    parallel_for(
        static_cast<size_t>(width) * height,
        [&](size_t idx) {
            const int px = static_cast<int>(idx) % width;
            const int py = static_cast<int>(idx) / width;
            Rng march_rng(mix_seed(cfg.seed, idx));
            const Ray ray = camera_ray(scene.camera, px, py, width, height);
            const RayMarchResult march =
                march_ray(scene, ray.origin, ray.dir, scene.march, &march_rng);
            const Rgb bg = env_radiance(env, ray.dir);
            if (march.opacity < 0.01f) {
                img.pixels[idx] = bg;
                return;
            }
            McConfig pixel_cfg = cfg;
            pixel_cfg.seed = mix_seed(cfg.seed ^ 0x5bd1e995u, idx);
            const Material mat = sdf_eval(scene, march.expected_point).second;
            const Rgb direct = estimate_direct(mat, march.expected_point, ray.dir,
                                               march.expected_normal, env, pixel_cfg);
            img.pixels[idx] = march.opacity * direct + (1.0f - march.opacity) * bg;
        },
        n_threads);
    return img;
}

Image mc_render_path(const SdfScene& scene, const CubeMipChain& env, const McConfig& cfg,
                     int width, int height, int n_threads) {
    Image img(width, height);
    parallel_for(
        static_cast<size_t>(width) * height,
        [&](size_t idx) {
            const int px = static_cast<int>(idx) % width;
            const int py = static_cast<int>(idx) / width;
            McConfig pixel_cfg = cfg;
            pixel_cfg.seed = mix_seed(cfg.seed, idx);
            const Ray ray = camera_ray(scene.camera, px, py, width, height);
            img.pixels[idx] = path_trace(scene, ray, env, pixel_cfg);
        },
        n_threads);
    return img;
}

ErrorMap error_map(const Image& a, const Image& b) {
    if (a.width != b.width || a.height != b.height) {
        throw std::invalid_argument("error_map: image dimensions differ");
    }
    ErrorMap out;
    out.l2_map = Image(a.width, a.height);
    double mse = 0.0;
    for (size_t i = 0; i < a.pixels.size(); ++i) {
        const Rgb ca = a.pixels[i].max(0.0f).min(1.0f);
        const Rgb cb = b.pixels[i].max(0.0f).min(1.0f);
        const float e2 = (ca - cb).square().mean();
        out.l2_map.pixels[i] = Rgb::Constant(e2);
        mse += e2;
    }
    mse /= std::max<size_t>(a.pixels.size(), 1);
    out.psnr = mse <= 0.0 ? 99.0 : std::min(10.0 * std::log10(1.0 / mse), 99.0);
    return out;
}

}  // namespace glint
