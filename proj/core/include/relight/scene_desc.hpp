#pragma once

#include <string>
#include <vector>

#include "relight/compositor.hpp"
#include "relight/fusion.hpp"
#include "relight/tracer.hpp"

namespace relight {

struct ReceiverRef {
    std::string path;  // OBJ with vertex colors
    Mat4 transform;
};

struct ObjectRef {
    std::string path;
    Mat4 transform;
    Material material;
};

// Parsed, validated scene file. All mesh/environment paths are resolved
// relative to the scene file's directory.
struct SceneDescription {
    std::vector<ReceiverRef> receiver_meshes;
    std::vector<ObjectRef> object_meshes;
    std::string environment;  // EXR or PFM
    Vec3 insertion_point;
    std::vector<Camera> cameras;
    RenderSettings render;    // env left empty until loaded
    ShapingParams shaping;
    FusionParams fusion;
};

// Strict-schema JSON: unknown keys are rejected, referenced files must
// exist, transforms must be invertible. Defaults are filled for the
// optional parameter blocks.
SceneDescription parse_scene(const std::string& path);

// Loads all meshes, applies transforms and builds the render-ready scene.
TracerScene build_tracer_scene(const SceneDescription& desc);

EquirectEnvMap load_environment(const SceneDescription& desc);

}  // namespace relight
