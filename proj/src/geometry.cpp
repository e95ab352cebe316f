// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#include "glint/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace glint {

float Primitive::distance(const Vec3f& p) const {
    const Vec3f q = p - center;
    switch (kind) {
        case PrimitiveKind::Sphere:
            return q.norm() - radius;
        case PrimitiveKind::Box: {
            const Vec3f d = q.cwiseAbs() - half_extent;
            const Vec3f outside = d.cwiseMax(0.0f);
            const float inside = std::min(d.maxCoeff(), 0.0f);
            return outside.norm() + inside;
        }
        case PrimitiveKind::Plane:
            return plane_normal.dot(p) - plane_offset;
        case PrimitiveKind::Torus: {
            const float ring = std::hypot(q.x(), q.z()) - major_radius;
            return std::hypot(ring, q.y()) - minor_radius;
        }
    }
    return std::numeric_limits<float>::infinity();
}

Ray camera_ray(const Camera& cam, int px, int py, int width, int height) {
    const Vec3f forward = (cam.look_at - cam.position).normalized();
    const Vec3f right = forward.cross(cam.up).normalized();
    const Vec3f up = right.cross(forward);
    const float tan_half = std::tan(radians(cam.fov_deg) * 0.5f);
    const float aspect = static_cast<float>(width) / height;
    const float sx = (2.0f * (px + 0.5f) / width - 1.0f) * tan_half * aspect;
    const float sy = (1.0f - 2.0f * (py + 0.5f) / height) * tan_half;
    return {cam.position, (forward + sx * right + sy * up).normalized()};
}

SdfHit sdf_distance(const SdfScene& scene, const Vec3f& x) {
    SdfHit hit;
    for (int i = 0; i < scene.primitive_count(); ++i) {
        const float d = scene.primitives[i].distance(x);
        if (d < hit.distance) {
            hit.distance = d;
            hit.primitive = i;
        }
    }
    return hit;
}

bool checker_alt(const Primitive& prim, const Vec3f& x) {
    if (!prim.checker) {
        return false;
    }
    const Vec3f q = (x - prim.center) / prim.checker->scale;
    const long long parity = static_cast<long long>(std::floor(q.x())) +
                             static_cast<long long>(std::floor(q.y())) +
                             static_cast<long long>(std::floor(q.z()));
    return parity & 1;
}

Material material_at(const SdfScene& scene, int primitive, const Vec3f& x,
                     const Material* overrides) {
    if (primitive < 0 || primitive >= scene.primitive_count()) {
        return Material();
    }
    const Primitive& prim = scene.primitives[primitive];
    Material mat = overrides ? overrides[primitive] : prim.material;
    if (checker_alt(prim, x)) {
        mat.albedo = prim.checker->albedo_alt;
    }
    return mat;
}

std::pair<float, Material> sdf_eval(const SdfScene& scene, const Vec3f& x) {
    const SdfHit hit = sdf_distance(scene, x);
    return {hit.distance, material_at(scene, hit.primitive, x)};
}

std::optional<Vec3f> normal_at(const SdfScene& scene, const Vec3f& x) {
    const float eps = 1e-4f * scene.bound_radius;
    Vec3f g;
    for (int axis = 0; axis < 3; ++axis) {
        Vec3f dx = Vec3f::Zero();
        dx[axis] = eps;
        g[axis] = sdf_distance(scene, x + dx).distance - sdf_distance(scene, x - dx).distance;
    }
    const float len = g.norm();
    if (len < 1e-12f) {
        return std::nullopt;
    }
    return Vec3f(g / len);
}

float neus_alpha(float s_i, float s_next, float sigma) {
    // alpha = 1 - Phi(sigma s_next) / Phi(sigma s_i), computed through
    // log-sigmoid so deep-inside samples (both CDFs underflowing) stay
    // finite.
    const double ratio = std::exp(log_sigmoid(static_cast<double>(sigma) * s_next) -
                                  log_sigmoid(static_cast<double>(sigma) * s_i));
    return static_cast<float>(std::max(1.0 - ratio, 0.0));
}

Vec3f reflect_dir(const Vec3f& d, const Vec3f& n) {
    return (-2.0f * d.dot(n) * n + d).normalized();
}

RayMarchResult march_ray(const SdfScene& scene, const Vec3f& origin, const Vec3f& dir,
                         const MarchConfig& cfg, Rng* rng) {
    RayMarchResult res;
    const int n = cfg.samples;
    const float dt = (cfg.far - cfg.near) / n;
    res.depths.resize(n);
    res.sdf_values.resize(n);
    res.alphas.assign(std::max(n - 1, 0), 0.0f);
    res.weights.assign(std::max(n - 1, 0), 0.0f);

    struct PerSample {
        int primitive;
    };
    std::vector<PerSample> info(n);
    for (int i = 0; i < n; ++i) {
        const float jitter = rng ? rng->uniform() : 0.5f;
        res.depths[i] = cfg.near + (i + jitter) * dt;
        const SdfHit hit = sdf_distance(scene, origin + res.depths[i] * dir);
        res.sdf_values[i] = hit.distance;
        info[i].primitive = hit.primitive;
    }

    double transmittance = 1.0;
    double weight_sum = 0.0;
    double depth_sum = 0.0;
    Vec3d normal_sum = Vec3d::Zero();
    constexpr float kMinShadeWeight = 1e-6f;
    for (int i = 0; i + 1 < n; ++i) {
        const float alpha = neus_alpha(res.sdf_values[i], res.sdf_values[i + 1], scene.sigma);
        res.alphas[i] = alpha;
        const float w = static_cast<float>(transmittance * alpha);
        res.weights[i] = w;
        transmittance *= 1.0 - alpha;
        if (w <= 0.0f) {
            continue;
        }
        weight_sum += w;
        depth_sum += static_cast<double>(w) * res.depths[i];
        if (w > kMinShadeWeight) {
            SurfaceSample s;
            s.t = res.depths[i];
            s.weight = w;
            s.position = origin + s.t * dir;
            s.primitive = info[i].primitive;
            const auto normal = normal_at(scene, s.position);
            s.normal = normal ? *normal : Vec3f(-dir);
            normal_sum += static_cast<double>(w) * s.normal.cast<double>();
            res.surface.push_back(s);
        }
    }

    res.opacity = static_cast<float>(weight_sum);
    if (res.opacity > 1e-3f) {
        res.expected_depth = static_cast<float>(depth_sum / std::max(weight_sum, 1e-6));
        const double len = normal_sum.norm();
        res.expected_normal =
            len > 1e-12 ? Vec3f((normal_sum / len).cast<float>()) : Vec3f(-dir);
    } else {
        res.degenerate = true;
        res.expected_depth = cfg.far;
        res.expected_normal = -dir;
    }
    res.expected_point = origin + res.expected_depth * dir;
    return res;
}

}  // namespace glint
