// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#include "glint/inverse.hpp"

#include "glint/errors.hpp"
#include "glint/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace glint {

ParamVector ParamVector::from_scene(const SdfScene& scene) {
    ParamVector p;
    p.values.reserve(static_cast<size_t>(scene.primitive_count()) * kPerPrimitive);
    for (const Primitive& prim : scene.primitives) {
        p.values.push_back(prim.material.albedo[0]);
        p.values.push_back(prim.material.albedo[1]);
        p.values.push_back(prim.material.albedo[2]);
        p.values.push_back(prim.material.roughness);
        p.values.push_back(prim.material.metallic);
    }
    return p;
}

ParamVector ParamVector::mid_gray(int primitive_count) {
    ParamVector p;
    p.values.assign(static_cast<size_t>(primitive_count) * kPerPrimitive, 0.5f);
    return p;
}

Material ParamVector::material(int primitive) const {
    const size_t base = static_cast<size_t>(primitive) * kPerPrimitive;
    return Material(Rgb(values[base], values[base + 1], values[base + 2]), values[base + 3],
                    values[base + 4]);
}

std::vector<Material> ParamVector::materials() const {
    std::vector<Material> mats;
    mats.reserve(primitive_count());
    for (int i = 0; i < primitive_count(); ++i) {
        mats.push_back(material(i));
    }
    return mats;
}

void ParamVector::project() {
    for (int i = 0; i < size(); ++i) {
        values[i] = std::clamp(values[i], lower_bound(i), upper_bound(i));
    }
}

InverseProblem::InverseProblem(const SdfScene& scene, std::vector<View> views,
                               const ShadingContext& ctx, int loss_march_samples, uint64_t seed,
                               int n_threads)
    : scene_(scene), views_(std::move(views)), ctx_(ctx), n_threads_(n_threads) {
    if (views_.empty()) {
        throw UsageError("InverseProblem: at least one view is required");
    }
    if (loss_march_samples > 0) {
        scene_.march.samples = loss_march_samples;
    }
    pixel_geoms_.resize(views_.size());
    for (size_t v = 0; v < views_.size(); ++v) {
        const View& view = views_[v];
        const int w = view.target.width;
        const int h = view.target.height;
        auto& geoms = pixel_geoms_[v];
        geoms.resize(static_cast<size_t>(w) * h);
        SdfScene view_scene = scene_;
        view_scene.camera = view.camera;
        const uint64_t seed_v = view_seed(seed, static_cast<int>(v));
        parallel_for(
            geoms.size(),
            [&](size_t idx) {
                Rng rng(mix_seed(seed_v, idx));
                const Ray ray = camera_ray(view.camera, static_cast<int>(idx) % w,
                                           static_cast<int>(idx) / w, w, h);
                geoms[idx] = trace_pixel(ctx_, view_scene, ray, &rng, /*force_secondary=*/true);
            },
            n_threads_);
    }
}

double InverseProblem::loss(const ParamVector& params) const {
    const std::vector<Material> mats = params.materials();
    double sum = 0.0;
    size_t count = 0;
    for (size_t v = 0; v < views_.size(); ++v) {
        const View& view = views_[v];
        const auto& geoms = pixel_geoms_[v];
        std::vector<double> partial(geoms.size());
        parallel_for(
            geoms.size(),
            [&](size_t idx) {
                const PixelShade shade = shade_pixel(ctx_, scene_, geoms[idx], mats.data());
                partial[idx] =
                    (shade.color - view.target.pixels[idx]).square().sum();
            },
            n_threads_);
        for (const double p : partial) {
            sum += p;
        }
        count += geoms.size() * 3;
    }
    return sum / static_cast<double>(count);
}

std::vector<double> InverseProblem::gradient(const ParamVector& params, double h) const {
    std::vector<double> grad(params.size(), 0.0);
    for (int i = 0; i < params.size(); ++i) {
        const float x = params.values[i];
        const float lo = params.lower_bound(i);
        const float hi = params.upper_bound(i);
        const float step = static_cast<float>(h);
        ParamVector probe = params;
        if (x + step <= hi && x - step >= lo) {
            probe.values[i] = x + step;
            const double lp = loss(probe);
            probe.values[i] = x - step;
            const double lm = loss(probe);
            grad[i] = (lp - lm) / (2.0 * h);
        } else if (x + step <= hi) {
            probe.values[i] = x + step;
            grad[i] = (loss(probe) - loss(params)) / h;
        } else {
            probe.values[i] = x - step;
            grad[i] = (loss(params) - loss(probe)) / h;
        }
    }
    return grad;
}

OptimizeResult optimize(const InverseProblem& problem, const ParamVector& init, int iterations,
                        const AdamConfig& cfg, const std::vector<uint8_t>* free_mask) {
    if (iterations < 0) {
        throw UsageError("optimize: iterations must be >= 0");
    }
    if (free_mask && static_cast<int>(free_mask->size()) != init.size()) {
        throw UsageError("optimize: free_mask size must match the parameter count");
    }
    OptimizeResult result;
    ParamVector current = init;
    current.project();
    ParamVector last_good = current;

    AdamState state;
    state.m.assign(current.size(), 0.0);
    state.v.assign(current.size(), 0.0);

    for (int it = 0; it < iterations; ++it) {
        const double l = problem.loss(current);
        if (!std::isfinite(l)) {
            result.aborted = true;
            current = last_good;
            break;
        }
        result.loss_trace.push_back(l);
        last_good = current;
        if (l <= cfg.converged_loss) {
            break;
        }

        std::vector<double> grad = problem.gradient(current, cfg.fd_step);
        if (free_mask) {
            for (size_t i = 0; i < grad.size(); ++i) {
                if (!(*free_mask)[i]) {
                    grad[i] = 0.0;
                }
            }
        }
        state.step += 1;
        const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
        const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
        for (int i = 0; i < current.size(); ++i) {
            state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
            state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
            const double m_hat = state.m[i] / bc1;
            const double v_hat = state.v[i] / bc2;
            current.values[i] -= static_cast<float>(cfg.learning_rate * m_hat /
                                                    (std::sqrt(v_hat) + cfg.epsilon));
        }
        current.project();
        result.iterations = static_cast<int>(state.step);
    }
    result.params = current;
    return result;
}

Rgbd align_channels(const std::vector<Rgb>& pred, const std::vector<Rgb>& gt) {
    if (pred.size() != gt.size()) {
        throw std::invalid_argument("align_channels: size mismatch");
    }
    Rgbd dot = Rgbd::Zero();
    Rgbd norm = Rgbd::Zero();
    for (size_t i = 0; i < pred.size(); ++i) {
        dot += (pred[i] * gt[i]).cast<double>();
        norm += (pred[i] * pred[i]).cast<double>();
    }
    Rgbd scales;
    for (int c = 0; c < 3; ++c) {
        scales[c] = norm[c] > 0.0 ? dot[c] / norm[c] : 1.0;
    }
    return scales;
}

void scale_channels(std::vector<Rgb>& values, const Rgbd& scales) {
    const Rgb k = scales.cast<float>();
    for (Rgb& v : values) {
        v *= k;
    }
}

std::vector<Rgb> albedo_triples(const ParamVector& params) {
    std::vector<Rgb> out;
    out.reserve(params.primitive_count());
    for (int i = 0; i < params.primitive_count(); ++i) {
        out.push_back(params.material(i).albedo);
    }
    return out;
}

}  // namespace glint
