// Copyright (c) 2026 the glintforge authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "glint/geometry.hpp"

#include <string>

namespace glint {

// Parses the JSON scene document (schema in docs/scene_schema.md). Field
// names are frozen; unknown fields raise SchemaError with the field path.
SdfScene parse_scene_json(const std::string& text, const std::string& origin = "scene");
SdfScene load_scene(const std::string& path);

/// Camera sidecar: a JSON object with the scene camera fields
/// (position / look_at / up / fov_deg).
Camera parse_camera_json(const std::string& text, const std::string& origin = "camera");
Camera load_camera(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace glint
