// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#include "glint/envlight.hpp"
#include "glint/errors.hpp"
#include "glint/scene_io.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace glint;
using namespace glint_test;

namespace {

const CubeMipChain& bright_x_chain() {
    // +x face bright over black, prefiltered once for the whole suite
    static const CubeMipChain chain = prefilter(face_light_cube(32, 0, 4.0f), 5, 128, 21);
    return chain;
}

}  // namespace

TEST_CASE("cube texel directions invert exactly") {
    Rng rng(2);
    for (int face = 0; face < 6; ++face) {
        for (int i = 0; i < 200; ++i) {
            const float u = rng.uniform();
            const float v = rng.uniform();
            const Vec3f d = cube_texel_dir(face, u, v);
            CHECK(d.norm() == doctest::Approx(1.0f));
            int face2;
            float u2;
            float v2;
            dir_to_cube_face(d, face2, u2, v2);
            CHECK(face2 == face);
            CHECK(u2 == doctest::Approx(u).epsilon(1e-5));
            CHECK(v2 == doctest::Approx(v).epsilon(1e-5));
        }
    }
}

TEST_CASE("cube face order follows +x -x +y -y +z -z") {
    CHECK(cube_texel_dir(0, 0.5f, 0.5f).isApprox(Vec3f(1, 0, 0), 1e-6f));
    CHECK(cube_texel_dir(1, 0.5f, 0.5f).isApprox(Vec3f(-1, 0, 0), 1e-6f));
    CHECK(cube_texel_dir(2, 0.5f, 0.5f).isApprox(Vec3f(0, 1, 0), 1e-6f));
    CHECK(cube_texel_dir(3, 0.5f, 0.5f).isApprox(Vec3f(0, -1, 0), 1e-6f));
    CHECK(cube_texel_dir(4, 0.5f, 0.5f).isApprox(Vec3f(0, 0, 1), 1e-6f));
    CHECK(cube_texel_dir(5, 0.5f, 0.5f).isApprox(Vec3f(0, 0, -1), 1e-6f));
    // v grows downward on every face
    CHECK(cube_texel_dir(0, 0.5f, 0.9f).y() < 0.0f);
    CHECK(cube_texel_dir(4, 0.5f, 0.9f).y() < 0.0f);
}

TEST_CASE("equirect_to_cube maps a constant image to a constant cube") {
    Image img(16, 8, Rgb::Constant(0.7f));
    const CubeMap cube = equirect_to_cube(img, 8);
    for (int face = 0; face < 6; ++face) {
        for (const Rgb& texel : cube.faces[face]) {
            CHECK(texel[0] == doctest::Approx(0.7f).epsilon(1e-6));
        }
    }
}

TEST_CASE("equirect_to_cube splits the +x and -x hemispheres") {
    // longitude indicator: 1 where the direction has x > 0
    const int w = 256;
    const int h = 128;
    Image img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const float lon = (static_cast<float>(x) + 0.5f) / w * 2.0f * static_cast<float>(kPi) -
                              static_cast<float>(kPi);
            img.at(x, y) = Rgb::Constant(std::cos(lon) > 0.0f ? 1.0f : 0.0f);
        }
    }
    const CubeMap cube = equirect_to_cube(img, 64);
    auto face_mean = [&](int face) {
        double acc = 0.0;
        for (const Rgb& t : cube.faces[face]) {
            acc += t[0];
        }
        return acc / cube.faces[face].size();
    };
    CHECK(face_mean(0) > 0.9);
    CHECK(face_mean(1) < 0.1);
}

TEST_CASE("the +y pole reads the top equirect row") {
    Image img(8, 4);
    for (int x = 0; x < 8; ++x) {
        img.at(x, 0) = Rgb::Constant(5.0f);  // top row only
    }
    const CubeMap cube = equirect_to_cube(img, 16);
    // center of the +y face looks straight up
    CHECK(cube.at(2, 8, 8)[0] == doctest::Approx(5.0f).epsilon(1e-4));
}

TEST_CASE("prefilter preserves constants at every level") {
    const CubeMap base(8, Rgb::Constant(0.9f));
    const CubeMipChain chain = prefilter(base, 4, 32, 7);
    REQUIRE(chain.level_count() == 4);
    for (const CubeMap& level : chain.levels) {
        for (int face = 0; face < 6; ++face) {
            for (const Rgb& texel : level.faces[face]) {
                CHECK(texel[0] == doctest::Approx(0.9f).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("prefilter level sizes and roughness schedule") {
    const CubeMipChain& chain = bright_x_chain();
    REQUIRE(chain.level_count() == 5);
    CHECK(chain.levels[0].size == 32);
    CHECK(chain.levels[1].size == 16);
    CHECK(chain.levels[4].size == 2);
    CHECK(chain.level_roughness(0) == doctest::Approx(kMinRoughness));
    CHECK(chain.level_roughness(4) == doctest::Approx(1.0f));
    for (int l = 1; l < 5; ++l) {
        CHECK(chain.level_roughness(l) > chain.level_roughness(l - 1));
    }
}

TEST_CASE("prefilter conserves mean radiance within 2 percent") {
    const CubeMipChain& chain = bright_x_chain();
    const double base_mean = chain.levels[0].mean().mean();
    for (int l = 0; l < chain.level_count(); ++l) {
        const double level_mean = chain.levels[l].mean().mean();
        CHECK(std::abs(level_mean - base_mean) / base_mean <= 0.02);
    }
}

TEST_CASE("angular spread is non-decreasing across levels") {
    // mean squared angular deviation from +x, radiance-weighted
    const CubeMipChain& chain = bright_x_chain();
    double prev = -1.0;
    for (int l = 0; l < chain.level_count(); ++l) {
        const CubeMap& level = chain.levels[l];
        double wsum = 0.0;
        double msd = 0.0;
        for (int face = 0; face < 6; ++face) {
            for (int y = 0; y < level.size; ++y) {
                for (int x = 0; x < level.size; ++x) {
                    const float lum = level.at(face, x, y).mean();
                    const Vec3f d = cube_texel_dir(face, (x + 0.5f) / level.size,
                                                   (y + 0.5f) / level.size);
                    const double angle = std::acos(std::clamp(d.x(), -1.0f, 1.0f));
                    msd += lum * angle * angle;
                    wsum += lum;
                }
            }
        }
        msd /= wsum;
        CHECK(msd >= prev - 1e-6);
        prev = msd;
    }
}

TEST_CASE("sample_mip at a level roughness is that level's bilinear read") {
    const CubeMipChain& chain = bright_x_chain();
    const Vec3f dir = Vec3f(1.0f, 0.2f, -0.1f).normalized();
    for (int l = 0; l < chain.level_count(); ++l) {
        const Rgb direct = sample_cube(chain.levels[l], dir);
        const Rgb mip = sample_mip(chain, dir, chain.level_roughness(l));
        CHECK(mip[0] == doctest::Approx(direct[0]).epsilon(1e-5));
    }
}

TEST_CASE("sample_mip matches a brute-force GGX convolution at low roughness") {
    const CubeMap base = face_light_cube(32, 0, 4.0f);
    const CubeMipChain& chain = bright_x_chain();
    const Vec3f dir(1, 0, 0);
    const Rgb mip = sample_mip(chain, dir, kMinRoughness);
    const Rgbd oracle = ggx_convolve_brute_force(base, Vec3d(1, 0, 0), kMinRoughness, 1 << 14, 4);
    CHECK(mip[0] == doctest::Approx(oracle[0]).epsilon(0.05));
}

TEST_CASE("sample_mip is continuous in roughness") {
    const CubeMipChain& chain = bright_x_chain();
    const float range = 4.0f;  // dynamic range of the bright-face chain
    Rng rng(33);
    for (int i = 0; i < 100; ++i) {
        Vec3f d(2 * rng.uniform() - 1, 2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
        if (d.norm() < 1e-3f) {
            d = Vec3f(1, 0, 0);
        }
        d.normalize();
        const float rho = kMinRoughness + (1.0f - kMinRoughness - 2e-4f) * rng.uniform();
        const Rgb a = sample_mip(chain, d, rho);
        const Rgb b = sample_mip(chain, d, rho + 1e-4f);
        CHECK(std::abs(a[0] - b[0]) <= 1e-2f * range);
    }
}

TEST_CASE("diffuse_irradiance is the top-level mip query") {
    const CubeMipChain& chain = bright_x_chain();
    const Vec3f n = Vec3f(0.5f, 0.5f, 0.0f).normalized();
    CHECK(diffuse_irradiance(chain, n)[0] == doctest::Approx(sample_mip(chain, n, 1.0f)[0]));

    const CubeMipChain flat = constant_chain(0.4f);
    CHECK(diffuse_irradiance(flat, n)[0] == doctest::Approx(0.4f));

    // cosine-weighted ordering: facing the light beats facing away
    CHECK(diffuse_irradiance(chain, Vec3f(1, 0, 0))[0] >
          diffuse_irradiance(chain, Vec3f(-1, 0, 0))[0]);
}

TEST_CASE("prefilter rejects bad arguments") {
    const CubeMap base(4);
    CHECK_THROWS_AS(prefilter(base, 1, 16, 0), UsageError);
    CHECK_THROWS_AS(prefilter(base, 2, 0, 0), UsageError);
    CHECK_THROWS_AS(equirect_to_cube(Image(4, 2), 2), UsageError);
}

TEST_CASE("CMIP file round-trips") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "glint_test_chain.cmip";
    const CubeMipChain chain = prefilter(face_light_cube(8, 2, 2.0f), 3, 16, 9);
    save_cmip(path.string(), chain);
    const CubeMipChain loaded = load_cmip(path.string());
    REQUIRE(loaded.level_count() == chain.level_count());
    CHECK(loaded.face_size == chain.face_size);
    for (int l = 0; l < chain.level_count(); ++l) {
        REQUIRE(loaded.levels[l].size == chain.levels[l].size);
        for (int face = 0; face < 6; ++face) {
            for (size_t i = 0; i < chain.levels[l].faces[face].size(); ++i) {
                CHECK((loaded.levels[l].faces[face][i] == chain.levels[l].faces[face][i]).all());
            }
        }
    }
    fs::remove(path);
}

TEST_CASE("CMIP loader rejects corrupt files") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "glint_bad.cmip";
    write_text_file(path.string(), "not a cmip file");
    CHECK_THROWS_AS(load_cmip(path.string()), SchemaError);
    fs::remove(path);
}
