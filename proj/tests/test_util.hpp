// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures and independent oracles for the test suites. The oracles
// here are written against the math directly (double precision, their own
// sampling code) so they do not share an implementation path with the
// library routines they check.

#pragma once

#include "glint/envlight.hpp"
#include "glint/geometry.hpp"
#include "glint/math.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace glint_test {

using namespace glint;

// --------------------------------------------------------------------------
// environments

/// Chain whose every texel is `value`; exact at all levels by construction.
inline CubeMipChain constant_chain(float value, int face_size = 16, int levels = 3) {
    CubeMipChain chain;
    chain.face_size = face_size;
    for (int l = 0; l < levels; ++l) {
        chain.levels.emplace_back(std::max(face_size >> l, 1), Rgb::Constant(value));
    }
    return chain;
}

/// Smooth latitudinal gradient between two colors (top = +y).
inline Image gradient_equirect(int width, int height, const Rgb& top, const Rgb& bottom) {
    Image img(width, height);
    for (int y = 0; y < height; ++y) {
        const float t = height > 1 ? static_cast<float>(y) / (height - 1) : 0.0f;
        for (int x = 0; x < width; ++x) {
            img.at(x, y) = top * (1.0f - t) + bottom * t;
        }
    }
    return img;
}

/// Base cube with one face set to `bright` and the rest to `dark`.
inline CubeMap face_light_cube(int size, int face, float bright, float dark = 0.0f) {
    CubeMap cube(size, Rgb::Constant(dark));
    for (auto& texel : cube.faces[face]) {
        texel = Rgb::Constant(bright);
    }
    return cube;
}

// --------------------------------------------------------------------------
// scenes

inline SdfScene sphere_scene(const Material& mat, float sigma = 500.0f, int samples = 256) {
    SdfScene scene;
    scene.sigma = sigma;
    scene.bound_radius = 5.0f;
    scene.camera = {Vec3f(0, 0, 3), Vec3f::Zero(), Vec3f(0, 1, 0), 45.0f};
    scene.march = {0.5f, 6.0f, samples};
    Primitive prim;
    prim.kind = PrimitiveKind::Sphere;
    prim.center = Vec3f::Zero();
    prim.radius = 1.0f;
    prim.material = mat;
    scene.primitives.push_back(prim);
    return scene;
}

/// Mirror sphere at the origin with a red diffuse wall on +x.
inline SdfScene mirror_wall_scene(int samples = 192) {
    SdfScene scene;
    scene.sigma = 500.0f;
    scene.bound_radius = 5.0f;
    scene.camera = {Vec3f(0, 0, 4), Vec3f::Zero(), Vec3f(0, 1, 0), 40.0f};
    scene.march = {0.5f, 10.0f, samples};

    Primitive sphere;
    sphere.kind = PrimitiveKind::Sphere;
    sphere.center = Vec3f::Zero();
    sphere.radius = 1.0f;
    sphere.material = Material(Rgb(0.95f, 0.95f, 0.95f), 0.02f, 1.0f);
    scene.primitives.push_back(sphere);

    Primitive wall;
    wall.kind = PrimitiveKind::Box;
    wall.center = Vec3f(2.4f, 0.0f, 0.0f);
    wall.half_extent = Vec3f(0.1f, 2.0f, 2.0f);
    wall.material = Material(Rgb(0.8f, 0.08f, 0.08f), 0.8f, 0.0f);
    scene.primitives.push_back(wall);
    return scene;
}

// --------------------------------------------------------------------------
// statistics

/// Regularized lower incomplete gamma P(a, x) (series / continued fraction).
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) {
        return 0.0;
    }
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-14) {
                break;
            }
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    double b = x + 1.0 - a;
    double c = 1e300;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) {
            d = 1e-300;
        }
        c = b + an / c;
        if (std::abs(c) < 1e-300) {
            c = 1e-300;
        }
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-14) {
            break;
        }
    }
    return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

/// Chi-square upper-tail p-value with `dof` degrees of freedom.
inline double chi2_p_value(double statistic, double dof) {
    return 1.0 - gamma_p(0.5 * dof, 0.5 * statistic);
}

// --------------------------------------------------------------------------
// independent DFG oracle

// Brute-force (F1, F2) estimate at (n.v, rho) with its own double-precision
// GGX sampler and Smith terms.
inline std::pair<double, double> dfg_brute_force(double n_dot_v, double rho, int samples,
                                                 uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double alpha = rho * rho;
    const double k = alpha / 2.0;
    n_dot_v = std::max(n_dot_v, 1e-3);
    const double vx = std::sqrt(std::max(1.0 - n_dot_v * n_dot_v, 0.0));
    double f1 = 0.0;
    double f2 = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double u1 = uni(rng);
        const double u2 = uni(rng);
        const double ct2 = (1.0 - u1) / (1.0 + (alpha * alpha - 1.0) * u1);
        const double ct = std::sqrt(ct2);
        const double st = std::sqrt(std::max(1.0 - ct2, 0.0));
        const double phi = 2.0 * kPi * u2;
        const double hx = st * std::cos(phi);
        const double hy = st * std::sin(phi);
        const double hz = ct;
        const double v_dot_h = vx * hx + n_dot_v * hz;
        const double lz = 2.0 * v_dot_h * hz - n_dot_v;
        if (lz <= 0.0 || v_dot_h <= 0.0) {
            continue;
        }
        auto g1 = [k](double c) { return c / (c * (1.0 - k) + k); };
        const double g = g1(n_dot_v) * g1(lz);
        const double w = g * v_dot_h / (n_dot_v * std::max(hz, 1e-9));
        const double m = 1.0 - v_dot_h;
        const double fc = m * m * m * m * m;
        f1 += (1.0 - fc) * w;
        f2 += fc * w;
    }
    return {f1 / samples, f2 / samples};
}

// Brute-force GGX convolution of a base cube at one direction, the oracle
// for the prefilter: sum L(l) (r.l) / sum (r.l) over GGX samples around r.
inline Rgbd ggx_convolve_brute_force(const CubeMap& base, const Vec3d& r, double rho, int samples,
                                     uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double alpha = rho * rho;
    // frame around r
    Vec3d t = std::abs(r.z()) < 0.9 ? Vec3d(0, 0, 1).cross(r) : Vec3d(1, 0, 0).cross(r);
    t.normalize();
    const Vec3d b = r.cross(t);
    Rgbd acc = Rgbd::Zero();
    double wsum = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double u1 = uni(rng);
        const double u2 = uni(rng);
        const double ct2 = (1.0 - u1) / (1.0 + (alpha * alpha - 1.0) * u1);
        const double ct = std::sqrt(ct2);
        const double st = std::sqrt(std::max(1.0 - ct2, 0.0));
        const double phi = 2.0 * kPi * u2;
        const Vec3d h = (st * std::cos(phi) * t + st * std::sin(phi) * b + ct * r).normalized();
        const Vec3d l = 2.0 * r.dot(h) * h - r;
        const double n_dot_l = r.dot(l);
        if (n_dot_l <= 0.0) {
            continue;
        }
        acc += sample_cube(base, l.cast<float>()).cast<double>() * n_dot_l;
        wsum += n_dot_l;
    }
    return wsum > 0.0 ? Rgbd(acc / wsum) : Rgbd::Zero();
}

}  // namespace glint_test
