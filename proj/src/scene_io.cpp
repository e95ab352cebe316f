// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#include "glint/scene_io.hpp"

#include "glint/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace glint {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw SchemaError(path + ": " + what);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) {
        fail(path, "expected an object");
    }
}

// Every consumed key must be declared; anything else is rejected by path.
void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& path) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key)) {
            fail(path + "." + key, "unknown field");
        }
    }
}

const json& field(const json& j, const char* name, const std::string& path) {
    auto it = j.find(name);
    if (it == j.end()) {
        fail(path + "." + name, "missing required field");
    }
    return *it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) {
        fail(path, "expected a number");
    }
    return j.get<double>();
}

Vec3f vec3(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3) {
        fail(path, "expected an array of 3 numbers");
    }
    Vec3f v;
    for (int i = 0; i < 3; ++i) {
        v[i] = static_cast<float>(number(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return v;
}

Camera parse_camera(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, {"position", "look_at", "up", "fov_deg"}, path);
    Camera cam;
    cam.position = vec3(field(j, "position", path), path + ".position");
    cam.look_at = vec3(field(j, "look_at", path), path + ".look_at");
    cam.up = vec3(field(j, "up", path), path + ".up");
    cam.fov_deg = static_cast<float>(number(field(j, "fov_deg", path), path + ".fov_deg"));
    if (!(cam.fov_deg > 0.0f && cam.fov_deg < 180.0f)) {
        fail(path + ".fov_deg", "must be in (0, 180)");
    }
    if ((cam.look_at - cam.position).norm() < 1e-9f) {
        fail(path + ".look_at", "must differ from position");
    }
    return cam;
}

Material parse_material(const json& j, const std::string& path, std::optional<Checker>& checker) {
    require_object(j, path);
    reject_unknown(j, {"albedo", "roughness", "metallic", "checker"}, path);
    const Rgb albedo = vec3(field(j, "albedo", path), path + ".albedo").array();
    const float rho = static_cast<float>(number(field(j, "roughness", path), path + ".roughness"));
    const float metal =
        static_cast<float>(number(field(j, "metallic", path), path + ".metallic"));
    if (rho < 0.0f || rho > 1.0f) {
        fail(path + ".roughness", "must be in [0, 1]");
    }
    if (metal < 0.0f || metal > 1.0f) {
        fail(path + ".metallic", "must be in [0, 1]");
    }
    if (auto it = j.find("checker"); it != j.end()) {
        const std::string cpath = path + ".checker";
        require_object(*it, cpath);
        reject_unknown(*it, {"albedo2", "scale"}, cpath);
        Checker c;
        c.albedo_alt = vec3(field(*it, "albedo2", cpath), cpath + ".albedo2").array();
        c.scale = static_cast<float>(number(field(*it, "scale", cpath), cpath + ".scale"));
        if (!(c.scale > 0.0f)) {
            fail(cpath + ".scale", "must be positive");
        }
        checker = c;
    }
    return Material(albedo, rho, metal);
}

Primitive parse_primitive(const json& j, const std::string& path) {
    require_object(j, path);
    const json& type_field = field(j, "type", path);
    if (!type_field.is_string()) {
        fail(path + ".type", "expected a string");
    }
    const std::string type = type_field.get<std::string>();
    Primitive prim;
    if (type == "sphere") {
        reject_unknown(j, {"type", "center", "radius", "material"}, path);
        prim.kind = PrimitiveKind::Sphere;
        prim.center = vec3(field(j, "center", path), path + ".center");
        prim.radius = static_cast<float>(number(field(j, "radius", path), path + ".radius"));
        if (!(prim.radius > 0.0f)) {
            fail(path + ".radius", "must be positive");
        }
    } else if (type == "box") {
        reject_unknown(j, {"type", "center", "size", "material"}, path);
        prim.kind = PrimitiveKind::Box;
        prim.center = vec3(field(j, "center", path), path + ".center");
        const Vec3f size = vec3(field(j, "size", path), path + ".size");
        if (size.minCoeff() <= 0.0f) {
            fail(path + ".size", "must be positive");
        }
        prim.half_extent = 0.5f * size;
    } else if (type == "plane") {
        reject_unknown(j, {"type", "normal", "offset", "material"}, path);
        prim.kind = PrimitiveKind::Plane;
        const Vec3f n = vec3(field(j, "normal", path), path + ".normal");
        if (n.norm() < 1e-9f) {
            fail(path + ".normal", "must be nonzero");
        }
        prim.plane_normal = n.normalized();
        prim.plane_offset =
            static_cast<float>(number(field(j, "offset", path), path + ".offset"));
    } else if (type == "torus") {
        reject_unknown(j, {"type", "center", "radii", "material"}, path);
        prim.kind = PrimitiveKind::Torus;
        prim.center = vec3(field(j, "center", path), path + ".center");
        const json& radii = field(j, "radii", path);
        if (!radii.is_array() || radii.size() != 2) {
            fail(path + ".radii", "expected [major, minor]");
        }
        prim.major_radius = static_cast<float>(number(radii[0], path + ".radii[0]"));
        prim.minor_radius = static_cast<float>(number(radii[1], path + ".radii[1]"));
        if (!(prim.major_radius > 0.0f) || !(prim.minor_radius > 0.0f)) {
            fail(path + ".radii", "must be positive");
        }
    } else {
        fail(path + ".type", "unknown primitive type \"" + type + "\"");
    }
    prim.material = parse_material(field(j, "material", path), path + ".material", prim.checker);
    return prim;
}

json parse_json_text(const std::string& text, const std::string& origin) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw SchemaError(origin + ": invalid JSON");
    }
    return j;
}

}  // namespace

SdfScene parse_scene_json(const std::string& text, const std::string& origin) {
    const json j = parse_json_text(text, origin);
    require_object(j, origin);
    reject_unknown(j, {"sigma", "bound_radius", "camera", "march", "primitives"}, origin);

    SdfScene scene;
    scene.sigma = static_cast<float>(number(field(j, "sigma", origin), origin + ".sigma"));
    if (!(scene.sigma > 0.0f)) {
        fail(origin + ".sigma", "must be positive");
    }
    if (auto it = j.find("bound_radius"); it != j.end()) {
        scene.bound_radius = static_cast<float>(number(*it, origin + ".bound_radius"));
        if (!(scene.bound_radius > 0.0f)) {
            fail(origin + ".bound_radius", "must be positive");
        }
    }
    scene.camera = parse_camera(field(j, "camera", origin), origin + ".camera");

    const json& march = field(j, "march", origin);
    const std::string mpath = origin + ".march";
    require_object(march, mpath);
    reject_unknown(march, {"near", "far", "samples"}, mpath);
    scene.march.near = static_cast<float>(number(field(march, "near", mpath), mpath + ".near"));
    scene.march.far = static_cast<float>(number(field(march, "far", mpath), mpath + ".far"));
    if (!(scene.march.near >= 0.0f) || !(scene.march.near < scene.march.far)) {
        fail(mpath, "requires 0 <= near < far");
    }
    if (!field(march, "samples", mpath).is_number_integer()) {
        fail(mpath + ".samples", "expected an integer");
    }
    scene.march.samples = field(march, "samples", mpath).get<int>();
    if (scene.march.samples < 2) {
        fail(mpath + ".samples", "must be >= 2");
    }

    const json& prims = field(j, "primitives", origin);
    if (!prims.is_array()) {
        fail(origin + ".primitives", "expected an array");
    }
    for (size_t i = 0; i < prims.size(); ++i) {
        scene.primitives.push_back(
            parse_primitive(prims[i], origin + ".primitives[" + std::to_string(i) + "]"));
    }
    return scene;
}

SdfScene load_scene(const std::string& path) {
    return parse_scene_json(read_text_file(path), path);
}

Camera parse_camera_json(const std::string& text, const std::string& origin) {
    return parse_camera(parse_json_text(text, origin), origin);
}

Camera load_camera(const std::string& path) {
    return parse_camera_json(read_text_file(path), path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write file: " + path);
    }
    out << text;
    if (!out) {
        throw IoError("short write on file: " + path);
    }
}

}  // namespace glint
