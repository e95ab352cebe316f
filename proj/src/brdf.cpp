// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#include "glint/brdf.hpp"

#include "glint/errors.hpp"
#include "glint/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

namespace glint {

Material::Material(const Rgb& a, float rho, float m)
    : albedo(a.max(0.0f).min(1.0f)),
      roughness(std::clamp(rho, kMinRoughness, 1.0f)),
      metallic(std::clamp(m, 0.0f, 1.0f)) {}

BrdfParts eval_brdf_parts(const Material& mat, const Vec3f& view_dir, const Vec3f& light_dir,
                          const Vec3f& normal) {
    BrdfParts out;
    const float n_dot_l = normal.dot(light_dir);
    if (n_dot_l <= 0.0f) {
        return out;
    }
    out.diffuse = (1.0f - mat.metallic) * mat.albedo / static_cast<float>(kPi);

    const Vec3f to_view = -view_dir;
    const float n_dot_v = normal.dot(to_view);
    const Vec3f h = (to_view + light_dir).normalized();
    const float n_dot_h = saturate(normal.dot(h));
    const float l_dot_h = saturate(light_dir.dot(h));

    const float alpha = ggx_alpha(mat.roughness);
    const float d = ggx_ndf(alpha, n_dot_h);
    const float g = smith_g(alpha, n_dot_v, n_dot_l);
    const Rgb f = fresnel_schlick(base_reflectance(mat.metallic, mat.albedo), l_dot_h);
    const float denom = std::max(4.0f * std::abs(n_dot_v) * std::abs(n_dot_l), 1e-6f);
    out.specular = f * (d * g / denom);
    return out;
}

Rgb eval_brdf(const Material& mat, const Vec3f& view_dir, const Vec3f& light_dir,
              const Vec3f& normal) {
    return eval_brdf_parts(mat, view_dir, light_dir, normal).total();
}

namespace {

// One batch of the (F1, F2) integrals. The integrand comes from splitting
// the Schlick Fresnel out of the specular lobe: weighting each GGX sample
// by G (v.h) / ((n.v)(n.h)) and by (1 - Fc) resp. Fc, Fc = (1 - v.h)^5.
// Accumulation in double; the caller floors n.v away from the singular
// n.d = 0 column.
std::pair<double, double> integrate_dfg_entry(double n_dot_v, double rho, int samples, Rng& rng) {
    const double alpha = ggx_alpha(rho);
    const Vec3d v(std::sqrt(std::max(1.0 - n_dot_v * n_dot_v, 0.0)), 0.0, n_dot_v);
    const Vec3d n(0.0, 0.0, 1.0);
    double f1 = 0.0;
    double f2 = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double u1 = rng.uniform_double();
        const double u2 = rng.uniform_double();
        const Vec3d h = sample_ggx(alpha, n, u1, u2).half_vector;
        const double v_dot_h = v.dot(h);
        const Vec3d l = 2.0 * v_dot_h * h - v;
        const double n_dot_l = l.z();
        if (n_dot_l <= 0.0 || v_dot_h <= 0.0) {
            continue;
        }
        const double n_dot_h = std::max(h.z(), 1e-8);
        const double g = smith_g(alpha, n_dot_v, n_dot_l);
        const double weight = g * v_dot_h / (n_dot_v * n_dot_h);
        const double fc = pow5(1.0 - v_dot_h);
        f1 += (1.0 - fc) * weight;
        f2 += fc * weight;
    }
    return {f1 / samples, f2 / samples};
}

}  // namespace

DfgLut bake_dfg_lut(int resolution, int samples_per_entry, uint64_t seed, int n_threads) {
    if (resolution < 2) {
        throw UsageError("bake_dfg_lut: resolution must be >= 2");
    }
    if (samples_per_entry < 64) {
        throw UsageError("bake_dfg_lut: samples_per_entry must be >= 64");
    }
    DfgLut lut;
    lut.resolution = resolution;
    lut.bake_samples = samples_per_entry;
    lut.data.assign(static_cast<size_t>(resolution) * resolution * 2, 0.0f);

    // The n.d = 0 column is evaluated half a cell in (the integrand's
    // 1 / (n.v) weight is singular there). The importance weights are
    // heavy-tailed near grazing views and sharp lobes, so entries whose
    // running estimate sits near the energy bound keep accumulating
    // batches until the estimate settles; the cap covers the true near-1
    // corner at rho_min. Batch continuation reuses the entry's stream, so
    // results stay deterministic per seed for any thread count.
    const float nov_floor = 0.5f / (resolution - 1);
    parallel_for(
        static_cast<size_t>(resolution) * resolution,
        [&](size_t idx) {
            const int i = static_cast<int>(idx) / resolution;  // roughness row
            const int j = static_cast<int>(idx) % resolution;  // n.d column
            const float nov = std::max(lut.grid_n_dot_d(j), nov_floor);
            const int base_batches = nov < 0.05f ? 16 : (nov < 0.15f ? 4 : 1);
            constexpr int kMaxBatches = 64;
            Rng rng(mix_seed(seed, idx));
            double f1 = 0.0;
            double f2 = 0.0;
            int batches = 0;
            while (batches < base_batches ||
                   (batches < kMaxBatches && (f1 + f2) / batches > 0.97)) {
                const auto [b1, b2] =
                    integrate_dfg_entry(nov, lut.grid_roughness(i), samples_per_entry, rng);
                f1 += b1;
                f2 += b2;
                ++batches;
            }
            lut.data[idx * 2] = static_cast<float>(f1 / batches);
            lut.data[idx * 2 + 1] = static_cast<float>(f2 / batches);
        },
        n_threads);

    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            float& f1 = lut.data[(static_cast<size_t>(i) * resolution + j) * 2];
            float& f2 = lut.data[(static_cast<size_t>(i) * resolution + j) * 2 + 1];
            if (f1 < -1e-3f || f1 > 1.0f + 5e-3f || f2 < -1e-3f || f2 > 1.0f + 5e-3f ||
                f1 + f2 > 1.0f + 1e-2f) {
                throw std::runtime_error(
                    "bake_dfg_lut: invariant violated at entry (rho_idx=" + std::to_string(i) +
                    ", nd_idx=" + std::to_string(j) + "): F1=" + std::to_string(f1) +
                    " F2=" + std::to_string(f2));
            }
            // shave Monte Carlo noise off the closed interval
            f1 = saturate(f1);
            f2 = saturate(f2);
        }
    }
    return lut;
}

std::pair<float, float> lookup_dfg(const DfgLut& lut, float n_dot_d, float rho) {
    const int r = lut.resolution;
    const float x = saturate(n_dot_d) * (r - 1);
    const float y =
        saturate((rho - kMinRoughness) / (1.0f - kMinRoughness)) * (r - 1);
    const int x0 = std::min(static_cast<int>(x), r - 2);
    const int y0 = std::min(static_cast<int>(y), r - 2);
    const float fx = x - x0;
    const float fy = y - y0;
    auto lerp2 = [&](auto get) {
        const float a = get(y0, x0) * (1 - fx) + get(y0, x0 + 1) * fx;
        const float b = get(y0 + 1, x0) * (1 - fx) + get(y0 + 1, x0 + 1) * fx;
        return a * (1 - fy) + b * fy;
    };
    return {lerp2([&](int i, int j) { return lut.f1(i, j); }),
            lerp2([&](int i, int j) { return lut.f2(i, j); })};
}

namespace {

constexpr char kDfgMagic[4] = {'D', 'F', 'G', 'L'};

void write_u32_le(std::ofstream& out, uint32_t v) {
    const uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                          static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32_le(std::ifstream& in) {
    uint8_t b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

static_assert(std::endian::native == std::endian::little,
              "cache file writers assume a little-endian host");

}  // namespace

void save_dfg_lut(const std::string& path, const DfgLut& lut) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write LUT file: " + path);
    }
    out.write(kDfgMagic, 4);
    out.put(1);  // version
    write_u32_le(out, static_cast<uint32_t>(lut.resolution));
    out.write(reinterpret_cast<const char*>(lut.data.data()),
              static_cast<std::streamsize>(lut.data.size() * sizeof(float)));
    if (!out) {
        throw IoError("short write on LUT file: " + path);
    }
}

DfgLut load_dfg_lut(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open LUT file: " + path);
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kDfgMagic, 4) != 0) {
        throw SchemaError(path + ": not a DFGL file");
    }
    const int version = in.get();
    if (version != 1) {
        throw SchemaError(path + ": unsupported DFGL version " + std::to_string(version));
    }
    DfgLut lut;
    lut.resolution = static_cast<int>(read_u32_le(in));
    if (!in || lut.resolution < 2 || lut.resolution > 1 << 14) {
        throw SchemaError(path + ": invalid DFGL resolution");
    }
    lut.data.resize(static_cast<size_t>(lut.resolution) * lut.resolution * 2);
    in.read(reinterpret_cast<char*>(lut.data.data()),
            static_cast<std::streamsize>(lut.data.size() * sizeof(float)));
    if (static_cast<size_t>(in.gcount()) != lut.data.size() * sizeof(float)) {
        throw SchemaError(path + ": truncated DFGL payload");
    }
    return lut;
}

}  // namespace glint
