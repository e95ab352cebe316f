// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <cstdint>
#include <utility>

namespace glint {

template <typename S>
using Vec3 = Eigen::Matrix<S, 3, 1>;
template <typename S>
using Arr3 = Eigen::Array<S, 3, 1>;

using Vec3f = Vec3<float>;
using Vec3d = Vec3<double>;

// Linear rgb radiance triple. Array semantics so * and / act per channel.
using Rgb = Eigen::Array3f;
using Rgbd = Eigen::Array<double, 3, 1>;

inline constexpr double kPi = 3.14159265358979323846;

template <typename S>
inline S saturate(S x) {
    return x < S(0) ? S(0) : (x > S(1) ? S(1) : x);
}

template <typename S>
inline S pow5(S x) {
    const S x2 = x * x;
    return x2 * x2 * x;
}

template <typename S>
inline S radians(S deg) {
    return deg * S(kPi / 180.0);
}

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Combines a base seed with a stream index (pixel, texel, lut entry, ...) so
// that per-item generators are independent and independent of thread count.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// PCG32 (Melissa O'Neill, pcg-random.org, Apache-2.0).
class Rng {
public:
    explicit Rng(uint64_t seed = 0x853c49e6748fea9bULL, uint64_t seq = 1) {
        state_ = 0;
        inc_ = (seq << 1u) | 1u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    uint32_t next_u32() {
        const uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        const uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
        const uint32_t rot = static_cast<uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    /// Uniform in [0, 1) with 24 bits of precision.
    float uniform() { return static_cast<float>(next_u32() >> 8) * 0x1p-24f; }

    /// Uniform double in [0, 1) with 53 bits.
    double uniform_double() {
        const uint64_t hi = static_cast<uint64_t>(next_u32());
        const uint64_t lo = static_cast<uint64_t>(next_u32());
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1p-53;
    }

private:
    uint64_t state_;
    uint64_t inc_;
};

// Right-handed orthonormal frame around a unit vector (Duff et al. 2017).
template <typename S>
inline std::pair<Vec3<S>, Vec3<S>> orthonormal_basis(const Vec3<S>& n) {
    const S sign = std::copysign(S(1), n.z());
    const S a = S(-1) / (sign + n.z());
    const S b = n.x() * n.y() * a;
    Vec3<S> t(S(1) + sign * n.x() * n.x() * a, sign * b, -sign * n.x());
    Vec3<S> u(b, sign + n.y() * n.y() * a, -n.y());
    return {t, u};
}

/// Numerically stable logistic sigmoid.
template <typename S>
inline S sigmoid(S x) {
    if (x >= S(0)) {
        return S(1) / (S(1) + std::exp(-x));
    }
    const S e = std::exp(x);
    return e / (S(1) + e);
}

/// log(sigmoid(x)) without underflow for large |x|.
template <typename S>
inline S log_sigmoid(S x) {
    if (x >= S(0)) {
        return -std::log1p(std::exp(-x));
    }
    return x - std::log1p(std::exp(x));
}

}  // namespace glint
