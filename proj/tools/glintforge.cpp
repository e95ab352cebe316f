// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0
//
// glintforge: split-sum SDF renderer, relighter and material estimator.
// Subcommands: bake-lut, bake-env, render, relight, compare-mc, estimate.

#include "glint/brdf.hpp"
#include "glint/envlight.hpp"
#include "glint/errors.hpp"
#include "glint/image.hpp"
#include "glint/inverse.hpp"
#include "glint/mc_oracle.hpp"
#include "glint/parallel.hpp"
#include "glint/scene_io.hpp"
#include "glint/shading.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace glint;

namespace {

constexpr const char* kToolVersion = "0.1.0";

uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open input for hashing: " + path);
    }
    uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<uint8_t>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Every command writes a manifest next to its outputs; re-running the
// command it records reproduces the outputs byte-exactly. Thread count is
// an execution detail and deliberately left out.
struct Manifest {
    std::string command;
    uint64_t seed = 0;
    json parameters = json::object();
    json inputs = json::object();
    std::vector<std::string> outputs;

    void add_input(const std::string& path) { inputs[path] = hex64(fnv1a64_file(path)); }

    void write(const std::string& path) const {
        json j;
        j["command"] = command;
        j["tool_version"] = kToolVersion;
        j["seed"] = seed;
        j["parameters"] = parameters;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        write_text_file(path, j.dump(2) + "\n");
    }
};

uint64_t resolve_seed(const std::optional<uint64_t>& flag) {
    if (flag) {
        return *flag;
    }
    if (const char* env = std::getenv("GLINTFORGE_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError("GLINTFORGE_SEED is not an unsigned integer");
        }
    }
    return 0;
}

json rgb_json(const Rgb& c) {
    return json::array({c[0], c[1], c[2]});
}

struct RenderArgs {
    std::string scene_path;
    std::string env_path;
    std::string lut_path;
    int width = 64;
    int height = 64;
    float rho_t = 0.3f;
    std::optional<uint64_t> seed;
    std::string indirect = "on";
    std::string background = "env";
    std::string out_prefix;
    int threads = 0;
};

void add_render_flags(CLI::App* cmd, RenderArgs& args, bool allow_indirect_toggle) {
    cmd->add_option("--scene", args.scene_path, "scene JSON file")->required();
    cmd->add_option("--env", args.env_path, "CMIP environment file")->required();
    cmd->add_option("--lut", args.lut_path, "DFGL lookup-table file")->required();
    cmd->add_option("--width", args.width)->check(CLI::PositiveNumber);
    cmd->add_option("--height", args.height)->check(CLI::PositiveNumber);
    cmd->add_option("--rho-t", args.rho_t, "second split-sum roughness threshold");
    cmd->add_option("--seed", args.seed);
    if (allow_indirect_toggle) {
        cmd->add_option("--indirect", args.indirect)->check(CLI::IsMember({"on", "off"}));
    }
    cmd->add_option("--background", args.background)->check(CLI::IsMember({"env", "black"}));
    cmd->add_option("--out", args.out_prefix, "output path prefix")->required();
    cmd->add_option("--threads", args.threads, "worker threads (0 = hardware)");
}

Image encode_normal_map(const Image& normals) {
    Image out = normals;
    for (Rgb& p : out.pixels) {
        p = 0.5f * (p + 1.0f);
    }
    return out;
}

int run_render(const std::string& command, const RenderArgs& args) {
    const uint64_t seed = resolve_seed(args.seed);
    const SdfScene scene = load_scene(args.scene_path);
    const CubeMipChain env = load_cmip(args.env_path);
    const DfgLut lut = load_dfg_lut(args.lut_path);

    ShadingContext ctx;
    ctx.environment = &env;
    ctx.lut = &lut;
    ctx.rho_t = args.rho_t;
    ctx.indirect_enabled = args.indirect == "on";
    ctx.background =
        args.background == "black" ? BackgroundMode::Black : BackgroundMode::Environment;

    const RenderOutput out =
        render_image(ctx, scene, args.width, args.height, seed, args.threads);

    const std::string prefix = args.out_prefix;
    write_pfm(prefix + ".pfm", out.color);
    write_png(prefix + ".png", tone_map_srgb(out.color));
    write_pfm(prefix + ".normal.pfm", encode_normal_map(out.normal));
    write_pfm(prefix + ".rough.pfm", out.rough);
    write_pfm(prefix + ".opacity.pfm", out.opacity);

    Manifest manifest;
    manifest.command = command;
    manifest.seed = seed;
    manifest.parameters = {{"scene", args.scene_path},   {"env", args.env_path},
                           {"lut", args.lut_path},       {"width", args.width},
                           {"height", args.height},      {"rho_t", args.rho_t},
                           {"indirect", args.indirect},  {"background", args.background},
                           {"out", args.out_prefix}};
    manifest.add_input(args.scene_path);
    manifest.add_input(args.env_path);
    manifest.add_input(args.lut_path);
    manifest.outputs = {prefix + ".pfm", prefix + ".png", prefix + ".normal.pfm",
                        prefix + ".rough.pfm", prefix + ".opacity.pfm"};
    manifest.write(prefix + ".manifest.json");
    return kExitOk;
}

int run_bake_lut(int size, int samples, const std::optional<uint64_t>& seed_flag,
                 const std::string& out, int threads) {
    const uint64_t seed = resolve_seed(seed_flag);
    if (size < 2) {
        throw UsageError("--size must be >= 2");
    }
    if (samples < 64) {
        throw UsageError("--samples must be >= 64");
    }
    const DfgLut lut = bake_dfg_lut(size, samples, seed, threads);
    save_dfg_lut(out, lut);

    Manifest manifest;
    manifest.command = "bake-lut";
    manifest.seed = seed;
    manifest.parameters = {{"size", size}, {"samples", samples}, {"out", out}};
    manifest.outputs = {out};
    manifest.write(out + ".manifest.json");
    return kExitOk;
}

int run_bake_env(const std::string& in, int faces, int levels, int samples,
                 const std::optional<uint64_t>& seed_flag, const std::string& out, int threads) {
    const uint64_t seed = resolve_seed(seed_flag);
    if (faces < 4 || faces > 512) {
        throw UsageError("--faces must be in [4, 512]");
    }
    if (levels < 2) {
        throw UsageError("--levels must be >= 2");
    }
    if (samples < 1) {
        throw UsageError("--samples must be >= 1");
    }
    const Image equirect = load_pfm(in);
    const CubeMap base = equirect_to_cube(equirect, faces);
    const CubeMipChain chain = prefilter(base, levels, samples, seed, threads);
    save_cmip(out, chain);

    Manifest manifest;
    manifest.command = "bake-env";
    manifest.seed = seed;
    manifest.parameters = {
        {"in", in}, {"faces", faces}, {"levels", levels}, {"samples", samples}, {"out", out}};
    manifest.add_input(in);
    manifest.outputs = {out};
    manifest.write(out + ".manifest.json");
    return kExitOk;
}

int run_compare_mc(const RenderArgs& args, int spp, const std::string& out_error,
                   const std::string& report_path) {
    const uint64_t seed = resolve_seed(args.seed);
    const SdfScene scene = load_scene(args.scene_path);
    const CubeMipChain env = load_cmip(args.env_path);
    const DfgLut lut = load_dfg_lut(args.lut_path);

    ShadingContext ctx;
    ctx.environment = &env;
    ctx.lut = &lut;
    ctx.rho_t = args.rho_t;
    ctx.indirect_enabled = false;  // the comparison targets the first split-sum
    const RenderOutput split =
        render_image(ctx, scene, args.width, args.height, seed, args.threads);

    McConfig cfg;
    cfg.spp = spp;
    cfg.seed = seed;
    const Image mc = mc_render_direct(scene, env, cfg, args.width, args.height, args.threads);

    const ErrorMap err = error_map(split.color, mc);
    write_pfm(out_error, err.l2_map);

    // Relative error is reported over solidly covered pixels.
    double mean_rel = 0.0;
    double max_rel = 0.0;
    size_t count = 0;
    for (size_t i = 0; i < mc.pixels.size(); ++i) {
        if (split.opacity.pixels[i][0] < 0.99f) {
            continue;
        }
        const Rgb ref = mc.pixels[i];
        const Rgb rel = ((split.color.pixels[i] - ref).abs() / ref.abs().max(1e-3f));
        const double r = rel.mean();
        mean_rel += r;
        max_rel = std::max(max_rel, r);
        ++count;
    }
    mean_rel = count ? mean_rel / count : 0.0;

    json report;
    report["spp"] = spp;
    report["psnr"] = err.psnr;
    report["mean_rel_error"] = mean_rel;
    report["max_rel_error"] = max_rel;
    write_text_file(report_path, report.dump(2) + "\n");

    Manifest manifest;
    manifest.command = "compare-mc";
    manifest.seed = seed;
    manifest.parameters = {{"scene", args.scene_path}, {"env", args.env_path},
                           {"lut", args.lut_path},     {"width", args.width},
                           {"height", args.height},    {"spp", spp},
                           {"out_error", out_error},   {"report", report_path}};
    manifest.add_input(args.scene_path);
    manifest.add_input(args.env_path);
    manifest.add_input(args.lut_path);
    manifest.outputs = {out_error, report_path};
    manifest.write(report_path + ".manifest.json");
    return kExitOk;
}

int run_estimate(const std::string& scene_path, const std::string& views_dir,
                 const std::string& env_path, const std::string& lut_path, int iters,
                 const std::optional<uint64_t>& seed_flag, float rho_t, int loss_samples,
                 const std::string& out, int threads) {
    const uint64_t seed = resolve_seed(seed_flag);
    if (iters < 0) {
        throw UsageError("--iters must be >= 0");
    }
    const SdfScene scene = load_scene(scene_path);
    const CubeMipChain env = load_cmip(env_path);
    const DfgLut lut = load_dfg_lut(lut_path);

    if (!fs::is_directory(views_dir)) {
        throw IoError("views directory not found: " + views_dir);
    }
    std::vector<std::string> view_files;
    for (const auto& entry : fs::directory_iterator(views_dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.path().extension() == ".pfm" &&
            name.find(".normal.") == std::string::npos &&
            name.find(".rough.") == std::string::npos &&
            name.find(".opacity.") == std::string::npos) {
            view_files.push_back(entry.path().string());
        }
    }
    std::sort(view_files.begin(), view_files.end());
    if (view_files.empty()) {
        throw UsageError("no view PFM files in " + views_dir);
    }

    std::vector<View> views;
    std::vector<std::string> sidecars;
    for (const std::string& pfm : view_files) {
        fs::path sidecar = fs::path(pfm);
        sidecar.replace_extension(".json");
        if (!fs::exists(sidecar)) {
            throw SchemaError("missing camera sidecar for view " + pfm);
        }
        View view;
        view.camera = load_camera(sidecar.string());
        view.target = load_pfm(pfm);
        views.push_back(std::move(view));
        sidecars.push_back(sidecar.string());
    }

    ShadingContext ctx;
    ctx.environment = &env;
    ctx.lut = &lut;
    ctx.rho_t = rho_t;

    InverseProblem problem(scene, std::move(views), ctx, loss_samples, seed, threads);
    const ParamVector init = ParamVector::mid_gray(scene.primitive_count());
    const OptimizeResult res = optimize(problem, init, iters);
    const double final_loss = problem.loss(res.params);

    // Self-calibration reference: the scene's own materials.
    const Rgbd scales =
        align_channels(albedo_triples(res.params), albedo_triples(ParamVector::from_scene(scene)));

    json result;
    result["materials"] = json::array();
    for (int i = 0; i < res.params.primitive_count(); ++i) {
        const Material m = res.params.material(i);
        result["materials"].push_back({{"albedo", rgb_json(m.albedo)},
                                       {"roughness", m.roughness},
                                       {"metallic", m.metallic}});
    }
    result["albedo_scales"] = json::array({scales[0], scales[1], scales[2]});
    result["final_loss"] = final_loss;
    result["iterations"] = res.iterations;
    result["aborted"] = res.aborted;
    write_text_file(out, result.dump(2) + "\n");

    Manifest manifest;
    manifest.command = "estimate";
    manifest.seed = seed;
    manifest.parameters = {{"scene", scene_path},   {"views", views_dir},
                           {"env", env_path},       {"lut", lut_path},
                           {"iters", iters},        {"rho_t", rho_t},
                           {"loss_samples", loss_samples}, {"out", out}};
    manifest.add_input(scene_path);
    manifest.add_input(env_path);
    manifest.add_input(lut_path);
    for (const std::string& f : view_files) {
        manifest.add_input(f);
    }
    for (const std::string& f : sidecars) {
        manifest.add_input(f);
    }
    manifest.outputs = {out};
    manifest.write(out + ".manifest.json");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"glintforge: split-sum renderer and material estimator over SDF scenes"};
    app.require_subcommand(1);

    // bake-lut
    auto* bake_lut = app.add_subcommand("bake-lut", "bake the DFG lookup table");
    int lut_size = 64;
    int lut_samples = 1024;
    std::optional<uint64_t> lut_seed;
    std::string lut_out;
    int lut_threads = 0;
    bake_lut->add_option("--size", lut_size, "table resolution (square)");
    bake_lut->add_option("--samples", lut_samples, "Monte Carlo samples per entry");
    bake_lut->add_option("--seed", lut_seed);
    bake_lut->add_option("--out", lut_out)->required();
    bake_lut->add_option("--threads", lut_threads);

    // bake-env
    auto* bake_env = app.add_subcommand("bake-env", "bake the prefiltered environment mip chain");
    std::string env_in;
    int env_faces = 64;
    int env_levels = 5;
    int env_samples = 256;
    std::optional<uint64_t> env_seed;
    std::string env_out;
    int env_threads = 0;
    bake_env->add_option("--in", env_in, "equirectangular PFM radiance map")->required();
    bake_env->add_option("--faces", env_faces, "cube face size (base level)");
    bake_env->add_option("--levels", env_levels, "mip levels");
    bake_env->add_option("--samples", env_samples, "GGX samples per texel");
    bake_env->add_option("--seed", env_seed);
    bake_env->add_option("--out", env_out)->required();
    bake_env->add_option("--threads", env_threads);

    // render / relight
    RenderArgs render_args;
    auto* render = app.add_subcommand("render", "render a scene (PFM + PNG + auxiliaries)");
    add_render_flags(render, render_args, /*allow_indirect_toggle=*/true);

    RenderArgs relight_args;
    auto* relight = app.add_subcommand(
        "relight", "render under a new environment; indirect light is traced via the "
                   "second split-sum");
    add_render_flags(relight, relight_args, /*allow_indirect_toggle=*/false);

    // compare-mc
    RenderArgs cmp_args;
    int cmp_spp = 4096;
    std::string cmp_out_error;
    std::string cmp_report;
    auto* compare_mc =
        app.add_subcommand("compare-mc", "split-sum vs Monte Carlo error map and report");
    compare_mc->add_option("--scene", cmp_args.scene_path)->required();
    compare_mc->add_option("--env", cmp_args.env_path)->required();
    compare_mc->add_option("--lut", cmp_args.lut_path)->required();
    compare_mc->add_option("--width", cmp_args.width)->check(CLI::PositiveNumber);
    compare_mc->add_option("--height", cmp_args.height)->check(CLI::PositiveNumber);
    compare_mc->add_option("--spp", cmp_spp)->check(CLI::PositiveNumber);
    compare_mc->add_option("--seed", cmp_args.seed);
    compare_mc->add_option("--out-error", cmp_out_error)->required();
    compare_mc->add_option("--report", cmp_report)->required();
    compare_mc->add_option("--threads", cmp_args.threads);

    // estimate
    std::string est_scene;
    std::string est_views;
    std::string est_env;
    std::string est_lut;
    int est_iters = 500;
    std::optional<uint64_t> est_seed;
    float est_rho_t = 0.3f;
    int est_loss_samples = 64;
    std::string est_out;
    int est_threads = 0;
    auto* estimate =
        app.add_subcommand("estimate", "recover per-primitive materials from rendered views");
    estimate->add_option("--scene", est_scene)->required();
    estimate->add_option("--views", est_views, "directory of view PFMs with camera sidecars")
        ->required();
    estimate->add_option("--env", est_env)->required();
    estimate->add_option("--lut", est_lut)->required();
    estimate->add_option("--iters", est_iters);
    estimate->add_option("--seed", est_seed);
    estimate->add_option("--rho-t", est_rho_t);
    estimate->add_option("--loss-samples", est_loss_samples,
                         "march samples for loss renders (0 = scene value)");
    estimate->add_option("--out", est_out)->required();
    estimate->add_option("--threads", est_threads);

    try {
        app.parse(argc, argv);
        if (bake_lut->parsed()) {
            return run_bake_lut(lut_size, lut_samples, lut_seed, lut_out, lut_threads);
        }
        if (bake_env->parsed()) {
            return run_bake_env(env_in, env_faces, env_levels, env_samples, env_seed, env_out,
                                env_threads);
        }
        if (render->parsed()) {
            return run_render("render", render_args);
        }
        if (relight->parsed()) {
            relight_args.indirect = "on";
            return run_render("relight", relight_args);
        }
        if (compare_mc->parsed()) {
            return run_compare_mc(cmp_args, cmp_spp, cmp_out_error, cmp_report);
        }
        if (estimate->parsed()) {
            return run_estimate(est_scene, est_views, est_env, est_lut, est_iters, est_seed,
                                est_rho_t, est_loss_samples, est_out, est_threads);
        }
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
