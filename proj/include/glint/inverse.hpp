// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "glint/shading.hpp"

#include <cstdint>
#include <vector>

namespace glint {

// Flat box-constrained material parameters, five per primitive:
// albedo r, g, b in [0,1], roughness in [kMinRoughness, 1], metallic in
// [0,1].
struct ParamVector {
    std::vector<float> values;

    static constexpr int kPerPrimitive = 5;

    static ParamVector from_scene(const SdfScene& scene);
    static ParamVector mid_gray(int primitive_count);

    int primitive_count() const { return static_cast<int>(values.size()) / kPerPrimitive; }
    int size() const { return static_cast<int>(values.size()); }

    float lower_bound(int i) const { return i % kPerPrimitive == 3 ? kMinRoughness : 0.0f; }
    float upper_bound(int) const { return 1.0f; }

    Material material(int primitive) const;
    std::vector<Material> materials() const;

    /// Clamps every coordinate into its box.
    void project();
};

struct View {
    Camera camera;
    Image target;  // linear HDR ground truth
};

// Material estimation setup: fixed geometry, environment and LUT; loss and
// gradient evaluations re-shade cached per-pixel ray geometry, which is
// exact because marching is material-independent.
class InverseProblem {
public:
    // loss_march_samples overrides scene.march.samples for loss renders
    // (<= 0 keeps the scene value). Loss images use each view's target size.
    InverseProblem(const SdfScene& scene, std::vector<View> views, const ShadingContext& ctx,
                   int loss_march_samples, uint64_t seed, int n_threads = 0);

    // Render seed of view v; loss renders reproduce render_image(...,
    // view_seed(seed, v)) bit-exactly under matching march settings.
    static uint64_t view_seed(uint64_t seed, int view) {
        return mix_seed(seed, 0x76696577ULL + static_cast<uint64_t>(view));
    }

    /// Mean squared error over all views, pixels and channels.
    double loss(const ParamVector& params) const;

    // Central finite differences per coordinate (one-sided against the box
    // bounds), step h.
    std::vector<double> gradient(const ParamVector& params, double h = 1e-3) const;

    const SdfScene& scene() const { return scene_; }
    int view_count() const { return static_cast<int>(views_.size()); }
    int param_count() const { return scene_.primitive_count() * ParamVector::kPerPrimitive; }

private:
    SdfScene scene_;
    std::vector<View> views_;
    ShadingContext ctx_;
    int n_threads_;
    std::vector<std::vector<PixelGeometry>> pixel_geoms_;  // per view
};

struct AdamConfig {
    double learning_rate = 0.05;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-12;
    double fd_step = 1e-3;
    // An exactly reproduced target makes the loss a true zero; stop there
    // instead of letting normalized steps wander off the fixed point.
    double converged_loss = 1e-14;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;
};

struct OptimizeResult {
    ParamVector params;
    std::vector<double> loss_trace;  // loss at the start of each iteration
    bool aborted = false;            // non-finite loss; params hold the last good iterate
    int iterations = 0;
};

// Adam with box projection after every step. `free_mask` (when given,
// one flag per coordinate) freezes the false entries at their initial
// values; known parameters are commonly pinned this way.
OptimizeResult optimize(const InverseProblem& problem, const ParamVector& init, int iterations,
                        const AdamConfig& cfg = {},
                        const std::vector<uint8_t>* free_mask = nullptr);

// Per-channel least-squares scale k_c = <pred, gt> / <pred, pred>; an
// all-zero channel maps to 1. Resolves the albedo/illumination scale
// ambiguity before comparisons.
Rgbd align_channels(const std::vector<Rgb>& pred, const std::vector<Rgb>& gt);
void scale_channels(std::vector<Rgb>& values, const Rgbd& scales);

/// Albedo triples of a parameter vector, one per primitive.
std::vector<Rgb> albedo_triples(const ParamVector& params);

}  // namespace glint
