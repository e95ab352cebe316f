// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#include "glint/envlight.hpp"

#include "glint/brdf.hpp"
#include "glint/errors.hpp"
#include "glint/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace glint {

CubeMap::CubeMap(int s, const Rgb& fill) : size(s) {
    for (auto& f : faces) {
        f.assign(static_cast<size_t>(s) * s, fill);
    }
}

double cube_texel_solid_angle(int size, int x, int y) {
    auto area = [](double u, double v) {
        return std::atan2(u * v, std::sqrt(u * u + v * v + 1.0));
    };
    const double u0 = 2.0 * x / size - 1.0;
    const double u1 = 2.0 * (x + 1) / size - 1.0;
    const double v0 = 2.0 * y / size - 1.0;
    const double v1 = 2.0 * (y + 1) / size - 1.0;
    return area(u1, v1) - area(u0, v1) - area(u1, v0) + area(u0, v0);
}

Rgbd CubeMap::mean() const {
    Rgbd acc = Rgbd::Zero();
    double weight = 0.0;
    for (int face = 0; face < 6; ++face) {
        for (int y = 0; y < size; ++y) {
            for (int x = 0; x < size; ++x) {
                const double w = cube_texel_solid_angle(size, x, y);
                acc += w * at(face, x, y).cast<double>();
                weight += w;
            }
        }
    }
    return weight > 0.0 ? Rgbd(acc / weight) : acc;
}

Vec3f cube_texel_dir(int face, float u, float v) {
    const float uc = 2.0f * u - 1.0f;
    const float vc = 2.0f * v - 1.0f;
    Vec3f d;
    switch (face) {
        case 0: d = Vec3f(1.0f, -vc, -uc); break;   // +x
        case 1: d = Vec3f(-1.0f, -vc, uc); break;   // -x
        case 2: d = Vec3f(uc, 1.0f, vc); break;     // +y
        case 3: d = Vec3f(uc, -1.0f, -vc); break;   // -y
        case 4: d = Vec3f(uc, -vc, 1.0f); break;    // +z
        default: d = Vec3f(-uc, -vc, -1.0f); break; // -z
    }
    return d.normalized();
}

void dir_to_cube_face(const Vec3f& dir, int& face, float& u, float& v) {
    const float ax = std::abs(dir.x());
    const float ay = std::abs(dir.y());
    const float az = std::abs(dir.z());
    float uc;
    float vc;
    float ma;
    if (ax >= ay && ax >= az) {
        ma = ax;
        if (dir.x() > 0) {
            face = 0;
            uc = -dir.z();
            vc = -dir.y();
        } else {
            face = 1;
            uc = dir.z();
            vc = -dir.y();
        }
    } else if (ay >= az) {
        ma = ay;
        if (dir.y() > 0) {
            face = 2;
            uc = dir.x();
            vc = dir.z();
        } else {
            face = 3;
            uc = dir.x();
            vc = -dir.z();
        }
    } else {
        ma = az;
        if (dir.z() > 0) {
            face = 4;
            uc = dir.x();
            vc = -dir.y();
        } else {
            face = 5;
            uc = -dir.x();
            vc = -dir.y();
        }
    }
    u = 0.5f * (uc / ma + 1.0f);
    v = 0.5f * (vc / ma + 1.0f);
}

namespace {

Rgb sample_cube_face(const CubeMap& cube, int face, float u, float v) {
    const int s = cube.size;
    const float x = u * s - 0.5f;
    const float y = v * s - 0.5f;
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const float fx = x - x0;
    const float fy = y - y0;
    auto cl = [&](int i) { return std::clamp(i, 0, s - 1); };
    const Rgb& p00 = cube.at(face, cl(x0), cl(y0));
    const Rgb& p10 = cube.at(face, cl(x0 + 1), cl(y0));
    const Rgb& p01 = cube.at(face, cl(x0), cl(y0 + 1));
    const Rgb& p11 = cube.at(face, cl(x0 + 1), cl(y0 + 1));
    return p00 * (1 - fx) * (1 - fy) + p10 * fx * (1 - fy) + p01 * (1 - fx) * fy + p11 * fx * fy;
}

}  // namespace

Rgb sample_cube(const CubeMap& cube, const Vec3f& dir) {
    int face;
    float u;
    float v;
    dir_to_cube_face(dir, face, u, v);
    return sample_cube_face(cube, face, u, v);
}

float CubeMipChain::level_roughness(int level) const {
    const int l = level_count();
    if (l <= 1) {
        return kMinRoughness;
    }
    return kMinRoughness + (1.0f - kMinRoughness) * static_cast<float>(level) / (l - 1);
}

CubeMap equirect_to_cube(const Image& img, int face_size) {
    if (face_size < 4) {
        throw UsageError("equirect_to_cube: face_size must be >= 4");
    }
    CubeMap cube(face_size);
    for (int face = 0; face < 6; ++face) {
        for (int y = 0; y < face_size; ++y) {
            for (int x = 0; x < face_size; ++x) {
                const Vec3f d = cube_texel_dir(face, (x + 0.5f) / face_size,
                                               (y + 0.5f) / face_size);
                // longitude 0 faces +x; v = 0 is the +90 deg latitude row
                const float lon = std::atan2(d.z(), d.x());
                const float lat = std::asin(std::clamp(d.y(), -1.0f, 1.0f));
                const float u = lon / (2.0f * static_cast<float>(kPi)) + 0.5f;
                const float v = 0.5f - lat / static_cast<float>(kPi);
                cube.at(face, x, y) = img.sample_wrap_clamp(u, v);
            }
        }
    }
    return cube;
}

namespace {

// GGX convolution of the base map at one direction, the r = n = v
// approximation of the split-sum prefilter. Weights are renormalized so a
// constant map stays constant at every roughness.
Rgb convolve_texel(const CubeMap& base, const Vec3f& r, float alpha, int samples, Rng& rng) {
    Rgbd acc = Rgbd::Zero();
    double weight_sum = 0.0;
    for (int s = 0; s < samples; ++s) {
        const Vec3f h = sample_ggx(alpha, r, rng.uniform(), rng.uniform()).half_vector;
        const Vec3f l = (2.0f * r.dot(h) * h - r).normalized();
        const float n_dot_l = r.dot(l);
        if (n_dot_l <= 0.0f) {
            continue;
        }
        acc += (sample_cube(base, l) * n_dot_l).cast<double>();
        weight_sum += n_dot_l;
    }
    if (weight_sum <= 0.0) {
        return sample_cube(base, r);
    }
    return (acc / weight_sum).cast<float>();
}

}  // namespace

CubeMipChain prefilter(const CubeMap& base, int levels, int samples_per_texel, uint64_t seed,
                       int n_threads) {
    if (levels < 2) {
        throw UsageError("prefilter: levels must be >= 2");
    }
    if (samples_per_texel < 1) {
        throw UsageError("prefilter: samples_per_texel must be >= 1");
    }
    CubeMipChain chain;
    chain.face_size = base.size;
    chain.levels.reserve(levels);
    for (int l = 0; l < levels; ++l) {
        chain.levels.emplace_back(std::max(base.size >> l, 1));
    }
    const Rgbd base_mean = base.mean();
    for (int l = 0; l < levels; ++l) {
        CubeMap& level = chain.levels[l];
        const float alpha = ggx_alpha(chain.level_roughness(l));
        const int s = level.size;
        parallel_for(
            static_cast<size_t>(6) * s * s,
            [&](size_t idx) {
                const int face = static_cast<int>(idx / (static_cast<size_t>(s) * s));
                const int rem = static_cast<int>(idx % (static_cast<size_t>(s) * s));
                const int y = rem / s;
                const int x = rem % s;
                const Vec3f r = cube_texel_dir(face, (x + 0.5f) / s, (y + 0.5f) / s);
                Rng rng(mix_seed(seed, (static_cast<uint64_t>(l) << 32) | idx));
                level.at(face, x, y) = convolve_texel(base, r, alpha, samples_per_texel, rng);
            },
            n_threads);
        // The texel kernels are row-normalized, which preserves constants
        // but lets the spherical mean of directional content drift at wide
        // kernels. Pin each level's mean back to the base level's.
        const Rgbd level_mean = level.mean();
        Rgb scale = Rgb::Ones();
        for (int c = 0; c < 3; ++c) {
            if (base_mean[c] > 0.0 && level_mean[c] > 0.0) {
                scale[c] = static_cast<float>(base_mean[c] / level_mean[c]);
            }
        }
        if ((scale != 1.0f).any()) {
            for (auto& face : level.faces) {
                for (Rgb& texel : face) {
                    texel *= scale;
                }
            }
        }
    }
    return chain;
}

Rgb sample_mip(const CubeMipChain& chain, const Vec3f& dir, float rho) {
    const int levels = chain.level_count();
    const float t = saturate((rho - kMinRoughness) / (1.0f - kMinRoughness)) * (levels - 1);
    const int l0 = std::min(static_cast<int>(t), levels - 2);
    const float f = t - l0;
    const Rgb a = sample_cube(chain.levels[l0], dir);
    const Rgb b = sample_cube(chain.levels[l0 + 1], dir);
    return a * (1.0f - f) + b * f;
}

Rgb diffuse_irradiance(const CubeMipChain& chain, const Vec3f& normal) {
    return sample_mip(chain, normal, 1.0f);
}

namespace {

constexpr char kCmipMagic[4] = {'C', 'M', 'I', 'P'};

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

}  // namespace

void save_cmip(const std::string& path, const CubeMipChain& chain) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write mip-chain file: " + path);
    }
    out.write(kCmipMagic, 4);
    out.put(1);  // version
    write_u32_le(out, static_cast<uint32_t>(chain.face_size));
    write_u32_le(out, static_cast<uint32_t>(chain.level_count()));
    std::vector<float> buf;
    for (const CubeMap& level : chain.levels) {
        for (const auto& face : level.faces) {
            buf.resize(face.size() * 3);
            for (size_t i = 0; i < face.size(); ++i) {
                buf[i * 3 + 0] = face[i][0];
                buf[i * 3 + 1] = face[i][1];
                buf[i * 3 + 2] = face[i][2];
            }
            out.write(reinterpret_cast<const char*>(buf.data()),
                      static_cast<std::streamsize>(buf.size() * sizeof(float)));
        }
    }
    if (!out) {
        throw IoError("short write on mip-chain file: " + path);
    }
}

CubeMipChain load_cmip(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open mip-chain file: " + path);
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kCmipMagic, 4) != 0) {
        throw SchemaError(path + ": not a CMIP file");
    }
    const int version = in.get();
    if (version != 1) {
        throw SchemaError(path + ": unsupported CMIP version " + std::to_string(version));
    }
    CubeMipChain chain;
    chain.face_size = static_cast<int>(read_u32_le(in));
    const int levels = static_cast<int>(read_u32_le(in));
    if (!in || chain.face_size < 1 || chain.face_size > 1 << 14 || levels < 2 || levels > 32) {
        throw SchemaError(path + ": invalid CMIP dimensions");
    }
    std::vector<float> buf;
    for (int l = 0; l < levels; ++l) {
        CubeMap level(std::max(chain.face_size >> l, 1));
        for (auto& face : level.faces) {
            buf.resize(face.size() * 3);
            in.read(reinterpret_cast<char*>(buf.data()),
                    static_cast<std::streamsize>(buf.size() * sizeof(float)));
            if (static_cast<size_t>(in.gcount()) != buf.size() * sizeof(float)) {
                throw SchemaError(path + ": truncated CMIP payload");
            }
            for (size_t i = 0; i < face.size(); ++i) {
                face[i] = Rgb(buf[i * 3], buf[i * 3 + 1], buf[i * 3 + 2]);
            }
        }
        chain.levels.push_back(std::move(level));
    }
    return chain;
}

}  // namespace glint
