// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#include "glint/brdf.hpp"
#include "glint/errors.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

using namespace glint;
using namespace glint_test;

namespace {

// One shared bake keeps the suite fast; determinism is tested separately.
const DfgLut& shared_lut() {
    static const DfgLut lut = bake_dfg_lut(64, 4096, /*seed=*/11);
    return lut;
}

}  // namespace

TEST_CASE("ggx_ndf closed-form values") {
    CHECK(ggx_ndf(1.0, 1.0) == doctest::Approx(1.0 / kPi).epsilon(1e-12));
    // cos = 0 collapses the parenthesis to 1
    CHECK(ggx_ndf(0.3, 0.0) == doctest::Approx(0.09 / kPi).epsilon(1e-12));
    CHECK(ggx_ndf(0.5, 1.0) == doctest::Approx(4.0 / kPi).epsilon(1e-12));
    CHECK_THROWS_AS(ggx_ndf(0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(ggx_ndf(-1.0, 0.5), std::invalid_argument);
}

TEST_CASE("ggx_ndf is nonnegative and finite") {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double d = ggx_ndf<double>(0.01 + 0.99 * rng.uniform(), rng.uniform());
        CHECK(d >= 0.0);
        CHECK(std::isfinite(d));
    }
}

TEST_CASE("smith_g endpoints and hand value") {
    CHECK(smith_g(0.7, 1.0, 1.0) == doctest::Approx(1.0));
    CHECK(smith_g(0.7, 0.4, 0.0) == doctest::Approx(0.0));
    // G1(0.5) with k = 0.25 is 0.8; separable product 0.64
    CHECK(smith_g(0.5, 0.5, 0.5) == doctest::Approx(0.64).epsilon(1e-6));
}

TEST_CASE("fresnel_schlick endpoints and hand value") {
    const Rgb f0(0.04f, 0.5f, 1.0f);
    const Rgb at_one = fresnel_schlick(f0, 1.0f);
    const Rgb at_zero = fresnel_schlick(f0, 0.0f);
    for (int c = 0; c < 3; ++c) {
        CHECK(at_one[c] == doctest::Approx(f0[c]));
        CHECK(at_zero[c] == doctest::Approx(1.0f));
    }
    const Rgb mid = fresnel_schlick(Rgb::Constant(0.04f), 0.5f);
    CHECK(mid[0] == doctest::Approx(0.04 + 0.96 * 0.03125).epsilon(1e-6));
}

TEST_CASE("base_reflectance blends dielectric and metal") {
    const Rgb dielectric = base_reflectance(0.0f, Rgb(0.3f, 0.6f, 0.9f));
    for (int c = 0; c < 3; ++c) {
        CHECK(dielectric[c] == doctest::Approx(0.04f));
    }
    const Rgb metal = base_reflectance(1.0f, Rgb(1.0f, 0.0f, 0.0f));
    CHECK(metal[0] == doctest::Approx(1.0f));
    CHECK(metal[1] == doctest::Approx(0.0f));
    const Rgb half = base_reflectance(0.5f, Rgb::Constant(0.8f));
    CHECK(half[0] == doctest::Approx(0.42f));
}

TEST_CASE("material clamps on construction") {
    const Material mat(Rgb(-0.5f, 2.0f, 0.5f), 0.0f, 1.5f);
    CHECK(mat.albedo[0] == 0.0f);
    CHECK(mat.albedo[1] == 1.0f);
    CHECK(mat.roughness == kMinRoughness);
    CHECK(mat.metallic == 1.0f);
}

TEST_CASE("eval_brdf metallic kills diffuse, grazing light kills specular") {
    const Vec3f n(0, 0, 1);
    const Vec3f view(0, 0, -1);  // looking straight down the normal
    const Material metal(Rgb::Constant(0.8f), 0.4f, 1.0f);
    const Vec3f light = Vec3f(0.3f, 0.1f, 0.95f).normalized();
    CHECK(eval_brdf_parts(metal, view, light, n).diffuse.maxCoeff() == 0.0f);

    const Material dielectric(Rgb::Constant(0.5f), 0.4f, 0.0f);
    const Vec3f grazing(1, 0, 0);
    CHECK(eval_brdf_parts(dielectric, view, grazing, n).specular.maxCoeff() == 0.0f);
}

TEST_CASE("eval_brdf normal incidence matches scalar evaluation") {
    // m=0, a=1, rho=1: h=n, all cosines 1. D = 1/pi, G = 1, F = 0.04.
    const Material mat(Rgb::Constant(1.0f), 1.0f, 0.0f);
    const Vec3f n(0, 0, 1);
    const Rgb f = eval_brdf(mat, Vec3f(0, 0, -1), Vec3f(0, 0, 1), n);
    const double expected = 1.0 / kPi + (1.0 / kPi) * 0.04 / 4.0;
    CHECK(f[0] == doctest::Approx(expected).epsilon(1e-5));
    CHECK(f[1] == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("eval_brdf output is nonnegative and finite for random inputs") {
    Rng rng(17);
    auto rand_dir = [&] {
        Vec3f v;
        do {
            v = Vec3f(2 * rng.uniform() - 1, 2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
        } while (v.norm() < 1e-3f);
        return Vec3f(v.normalized());
    };
    for (int i = 0; i < 2000; ++i) {
        const Vec3f n = rand_dir();
        const Material mat(Rgb(rng.uniform(), rng.uniform(), rng.uniform()), rng.uniform(),
                           rng.uniform());
        const Rgb f = eval_brdf(mat, rand_dir(), rand_dir(), n);
        for (int c = 0; c < 3; ++c) {
            CHECK(f[c] >= 0.0f);
            CHECK(std::isfinite(f[c]));
        }
    }
}

TEST_CASE("sample_ggx at u1=0 returns the normal at density D(1)") {
    const Vec3f n = Vec3f(0.3f, -0.5f, 0.8f).normalized();
    const auto s = sample_ggx(0.25f, n, 0.0f, 0.37f);
    CHECK(s.half_vector.dot(n) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.pdf == doctest::Approx(ggx_ndf(0.25f, 1.0f)).epsilon(1e-5));
}

TEST_CASE("sample_ggx concentrates as alpha goes to zero") {
    const Vec3f n(0, 1, 0);
    Rng rng(5);
    double sum_angle = 0.0;
    const int count = 10000;
    for (int i = 0; i < count; ++i) {
        const auto s = sample_ggx(0.01f, n, rng.uniform(), rng.uniform());
        sum_angle += std::acos(std::min(1.0f, s.half_vector.dot(n)));
    }
    CHECK(sum_angle / count < 1.0 * kPi / 180.0);
}

TEST_CASE("sample_ggx cosine histogram passes a chi-square test") {
    const double alpha = 0.5;
    const Vec3f n(0, 0, 1);
    const int n_samples = 100000;
    const int n_bins = 32;
    std::vector<double> observed(n_bins, 0.0);
    Rng rng(29);
    for (int i = 0; i < n_samples; ++i) {
        const auto s = sample_ggx(static_cast<float>(alpha), n, rng.uniform(), rng.uniform());
        const double c = saturate<double>(s.half_vector.z());
        const int bin = std::min(static_cast<int>(c * n_bins), n_bins - 1);
        observed[bin] += 1.0;
    }
    // expected density of cos(theta_h) is 2 pi D(c) c, integrated per bin
    // by midpoint quadrature
    std::vector<double> expected(n_bins, 0.0);
    const int sub = 512;
    for (int b = 0; b < n_bins; ++b) {
        double integral = 0.0;
        for (int k = 0; k < sub; ++k) {
            const double c = (b + (k + 0.5) / sub) / n_bins;
            integral += 2.0 * kPi * ggx_ndf(alpha, c) * c / (n_bins * sub);
        }
        expected[b] = integral * n_samples;
    }
    double stat = 0.0;
    int dof = -1;
    double pool_obs = 0.0;
    double pool_exp = 0.0;
    for (int b = 0; b < n_bins; ++b) {
        if (expected[b] < 5.0) {
            pool_obs += observed[b];
            pool_exp += expected[b];
            continue;
        }
        stat += (observed[b] - expected[b]) * (observed[b] - expected[b]) / expected[b];
        dof += 1;
    }
    if (pool_exp >= 5.0) {
        stat += (pool_obs - pool_exp) * (pool_obs - pool_exp) / pool_exp;
        dof += 1;
    }
    const double p = chi2_p_value(stat, dof);
    CHECK(p > 0.01);
}

TEST_CASE("sample_ggx half-vector pdf integrates to one") {
    // midpoint quadrature over theta; the pdf is azimuthally uniform
    for (const double alpha : {0.04, 0.25, 1.0}) {
        double integral = 0.0;
        const int nt = 65536;
        for (int i = 0; i < nt; ++i) {
            const double theta = (i + 0.5) * (kPi / 2) / nt;
            const double pdf = ggx_ndf(alpha, std::cos(theta)) * std::cos(theta);
            integral += pdf * std::sin(theta) * (kPi / 2 / nt) * 2 * kPi;
        }
        CHECK(integral == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("white furnace bound holds under GGX importance sampling") {
    Rng rng(41);
    for (const float rho : {0.05f, 0.3f, 0.7f, 1.0f}) {
        for (const float nov : {1.0f, 0.6f, 0.2f}) {
            const Material mat(Rgb::Constant(1.0f), rho, 1.0f);
            const float alpha = ggx_alpha(rho);
            const Vec3f n(0, 0, 1);
            const Vec3f v(std::sqrt(1.0f - nov * nov), 0.0f, nov);
            Rgbd acc = Rgbd::Zero();
            const int count = 4096;
            for (int s = 0; s < count; ++s) {
                const auto h = sample_ggx(alpha, n, rng.uniform(), rng.uniform()).half_vector;
                const Vec3f l = (2.0f * v.dot(h) * h - v).normalized();
                if (n.dot(l) <= 0.0f || v.dot(h) <= 0.0f) {
                    continue;
                }
                const float pdf = ggx_ndf(alpha, saturate(n.dot(h))) * saturate(n.dot(h)) /
                                  std::max(4.0f * v.dot(h), 1e-9f);
                const Rgb f = eval_brdf_parts(mat, -v, l, n).specular;
                acc += (f * n.dot(l) / std::max(pdf, 1e-12f)).cast<double>();
            }
            const double estimate = (acc / count).maxCoeff();
            CHECK(estimate >= 0.0);
            CHECK(estimate <= 1.02);
        }
    }
}

TEST_CASE("baked LUT endpoint is the mirror Fresnel limit") {
    const DfgLut& lut = shared_lut();
    const float f1 = lut.f1(0, lut.resolution - 1);  // rho = rho_min, n.d = 1
    const float f2 = lut.f2(0, lut.resolution - 1);
    CHECK(f1 >= 0.95f);
    CHECK(f1 <= 1.0f);
    CHECK(f2 >= 0.0f);
    CHECK(f2 <= 0.05f);

    const auto [o1, o2] = dfg_brute_force(1.0, kMinRoughness, 1 << 16, 999);
    CHECK(f1 == doctest::Approx(o1).epsilon(0.02));
    CHECK(std::abs(f2 - o2) < 0.02);
}

TEST_CASE("baked LUT entries stay within the energy bound") {
    const DfgLut& lut = shared_lut();
    for (int i = 0; i < lut.resolution; ++i) {
        for (int j = 0; j < lut.resolution; ++j) {
            const float f1 = lut.f1(i, j);
            const float f2 = lut.f2(i, j);
            CHECK(f1 >= 0.0f);
            CHECK(f1 <= 1.0f);
            CHECK(f2 >= 0.0f);
            CHECK(f2 <= 1.0f);
            CHECK(f1 + f2 <= 1.0f + 1e-2f);
        }
    }
}

TEST_CASE("LUT bake is bit-identical for a fixed seed and any thread count") {
    const DfgLut a = bake_dfg_lut(16, 128, 7, /*n_threads=*/1);
    const DfgLut b = bake_dfg_lut(16, 128, 7, /*n_threads=*/2);
    REQUIRE(a.data.size() == b.data.size());
    for (size_t i = 0; i < a.data.size(); ++i) {
        CHECK(a.data[i] == b.data[i]);
    }
}

TEST_CASE("LUT bake rejects bad sizes") {
    CHECK_THROWS_AS(bake_dfg_lut(1, 1024, 0), UsageError);
    CHECK_THROWS_AS(bake_dfg_lut(16, 32, 0), UsageError);
}

TEST_CASE("lookup_dfg reproduces grid points and midpoints") {
    const DfgLut& lut = shared_lut();
    const int i = 20;
    const int j = 40;
    const auto at_grid = lookup_dfg(lut, lut.grid_n_dot_d(j), lut.grid_roughness(i));
    CHECK(at_grid.first == doctest::Approx(lut.f1(i, j)).epsilon(1e-5));
    CHECK(at_grid.second == doctest::Approx(lut.f2(i, j)).epsilon(1e-5));

    const float mid_nd = 0.5f * (lut.grid_n_dot_d(j) + lut.grid_n_dot_d(j + 1));
    const auto at_mid = lookup_dfg(lut, mid_nd, lut.grid_roughness(i));
    CHECK(at_mid.first ==
          doctest::Approx(0.5f * (lut.f1(i, j) + lut.f1(i, j + 1))).epsilon(1e-4));

    const auto endpoint = lookup_dfg(lut, 1.0f, kMinRoughness);
    CHECK(endpoint.first > 0.95f);
    CHECK(endpoint.second < 0.05f);
}

TEST_CASE("lookup_dfg agrees with a fresh Monte Carlo estimate") {
    const DfgLut& lut = shared_lut();
    Rng rng(123);
    for (int trial = 0; trial < 20; ++trial) {
        const float nd = 0.05f + 0.95f * rng.uniform();
        const float rho = kMinRoughness + (1.0f - kMinRoughness) * rng.uniform();
        const auto [f1, f2] = lookup_dfg(lut, nd, rho);
        const auto [o1, o2] = dfg_brute_force(nd, rho, 1 << 16, 5000 + trial);
        CHECK(std::abs(f1 - o1) < 0.02);
        CHECK(std::abs(f2 - o2) < 0.02);
    }
}

TEST_CASE("DFGL file round-trips") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "glint_test_lut.bin";
    const DfgLut lut = bake_dfg_lut(8, 128, 3);
    save_dfg_lut(path.string(), lut);
    const DfgLut loaded = load_dfg_lut(path.string());
    CHECK(loaded.resolution == lut.resolution);
    REQUIRE(loaded.data.size() == lut.data.size());
    for (size_t i = 0; i < lut.data.size(); ++i) {
        CHECK(loaded.data[i] == lut.data[i]);
    }
    fs::remove(path);
}
