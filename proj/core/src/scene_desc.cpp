#include "relight/scene_desc.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>

#include <json.hpp>

#include "relight/image_io.hpp"

namespace relight {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
    if (!obj.is_object())
        throw scene_parse_error(where + ": expected a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw scene_parse_error(where + ": unknown key \"" + it.key() + "\"");
    }
}

const json& require(const json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw scene_parse_error(where + ": missing required field \"" + key + "\"");
    return *it;
}

float get_number(const json& v, const std::string& where) {
    if (!v.is_number())
        throw scene_parse_error(where + ": expected a number");
    return v.get<float>();
}

Vec3 get_vec3(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3)
        throw scene_parse_error(where + ": expected an array of 3 numbers");
    return {get_number(v[0], where), get_number(v[1], where),
            get_number(v[2], where)};
}

Mat4 get_transform(const json& obj, const std::string& where) {
    Mat4 m;
    auto it = obj.find("transform");
    if (it == obj.end()) return m;
    const json& v = *it;
    if (!v.is_array() || v.size() != 16)
        throw scene_parse_error(where + ": transform must be 16 row-major numbers");
    for (int i = 0; i < 16; ++i) m.m[i] = get_number(v[i], where);
    if (std::fabs(m.det3()) <= 1e-9f)
        throw scene_parse_error(where + ": transform is singular");
    return m;
}

std::string resolve_existing_path(const fs::path& base, const json& v,
                                  const std::string& where) {
    if (!v.is_string())
        throw scene_parse_error(where + ": expected a file path string");
    fs::path p = v.get<std::string>();
    if (p.is_relative()) p = base / p;
    if (!fs::exists(p))
        throw scene_parse_error(where + ": file does not exist: " + p.string());
    return p.string();
}

Camera parse_camera(const json& obj, const std::string& where) {
    require_keys(obj, where,
                 {"position", "look_at", "up", "vertical_fov", "resolution"});
    Camera cam;
    cam.position = get_vec3(require(obj, where, "position"), where + ".position");
    cam.look_at = get_vec3(require(obj, where, "look_at"), where + ".look_at");
    if (obj.contains("up")) cam.up = get_vec3(obj["up"], where + ".up");
    if (obj.contains("vertical_fov"))
        cam.vertical_fov = get_number(obj["vertical_fov"], where + ".vertical_fov");
    const json& res = require(obj, where, "resolution");
    if (!res.is_array() || res.size() != 2)
        throw scene_parse_error(where + ".resolution: expected [width, height]");
    cam.width = res[0].get<int>();
    cam.height = res[1].get<int>();
    try {
        cam.validate();
    } catch (const Error& e) {
        throw scene_parse_error(where + ": " + e.what());
    }
    return cam;
}

Material parse_material(const json& obj, const std::string& where) {
    require_keys(obj, where, {"base_color", "roughness", "metallic"});
    Material mat;
    if (obj.contains("base_color"))
        mat.base_color = get_vec3(obj["base_color"], where + ".base_color");
    if (obj.contains("roughness"))
        mat.roughness = get_number(obj["roughness"], where + ".roughness");
    if (obj.contains("metallic"))
        mat.metallic = get_number(obj["metallic"], where + ".metallic");
    try {
        mat.validate();
    } catch (const Error& e) {
        throw scene_parse_error(where + ": " + e.what());
    }
    return mat;
}

}  // namespace

SceneDescription parse_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open scene file: " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const std::exception& e) {
        throw scene_parse_error("malformed JSON in " + path + ": " + e.what());
    }

    const fs::path base = fs::path(path).parent_path();
    const std::string where = "scene";
    require_keys(root, where,
                 {"receiver_meshes", "object_meshes", "environment",
                  "insertion_point", "cameras", "render", "shaping", "fusion"});

    SceneDescription desc;

    const json& receivers = require(root, where, "receiver_meshes");
    if (!receivers.is_array() || receivers.empty())
        throw scene_parse_error("scene.receiver_meshes: need at least one entry");
    for (std::size_t i = 0; i < receivers.size(); ++i) {
        const std::string w = "scene.receiver_meshes[" + std::to_string(i) + "]";
        require_keys(receivers[i], w, {"path", "transform"});
        ReceiverRef ref;
        ref.path = resolve_existing_path(base, require(receivers[i], w, "path"), w);
        ref.transform = get_transform(receivers[i], w);
        desc.receiver_meshes.push_back(ref);
    }

    const json& objects = require(root, where, "object_meshes");
    if (!objects.is_array() || objects.empty())
        throw scene_parse_error("scene.object_meshes: need at least one entry");
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const std::string w = "scene.object_meshes[" + std::to_string(i) + "]";
        require_keys(objects[i], w, {"path", "transform", "material"});
        ObjectRef ref;
        ref.path = resolve_existing_path(base, require(objects[i], w, "path"), w);
        ref.transform = get_transform(objects[i], w);
        if (objects[i].contains("material"))
            ref.material = parse_material(objects[i]["material"], w + ".material");
        desc.object_meshes.push_back(ref);
    }

    desc.environment = resolve_existing_path(
        base, require(root, where, "environment"), "scene.environment");
    desc.insertion_point = get_vec3(require(root, where, "insertion_point"),
                                    "scene.insertion_point");

    const json& cams = require(root, where, "cameras");
    if (!cams.is_array() || cams.empty())
        throw scene_parse_error("scene.cameras: need at least one camera");
    for (std::size_t i = 0; i < cams.size(); ++i)
        desc.cameras.push_back(
            parse_camera(cams[i], "scene.cameras[" + std::to_string(i) + "]"));

    if (root.contains("render")) {
        const json& r = root["render"];
        require_keys(r, "scene.render", {"samples_per_pixel", "max_depth", "seed"});
        if (r.contains("samples_per_pixel"))
            desc.render.samples_per_pixel = r["samples_per_pixel"].get<int>();
        if (r.contains("max_depth")) desc.render.max_depth = r["max_depth"].get<int>();
        if (r.contains("seed")) desc.render.seed = r["seed"].get<std::uint64_t>();
        if (desc.render.samples_per_pixel < 1 || desc.render.max_depth < 1)
            throw scene_parse_error("scene.render: spp and max_depth must be >= 1");
    }
    if (root.contains("shaping")) {
        const json& s = root["shaping"];
        require_keys(s, "scene.shaping",
                     {"gamma_s", "s_min", "lambda", "epsilon", "validity_bound"});
        if (s.contains("gamma_s"))
            desc.shaping.gamma_s = get_number(s["gamma_s"], "scene.shaping.gamma_s");
        if (s.contains("s_min"))
            desc.shaping.s_min = get_number(s["s_min"], "scene.shaping.s_min");
        if (s.contains("lambda"))
            desc.shaping.lambda = get_number(s["lambda"], "scene.shaping.lambda");
        if (s.contains("epsilon"))
            desc.shaping.epsilon = get_number(s["epsilon"], "scene.shaping.epsilon");
        if (s.contains("validity_bound"))
            desc.shaping.validity_bound =
                get_number(s["validity_bound"], "scene.shaping.validity_bound");
        try {
            desc.shaping.validate();
        } catch (const Error& e) {
            throw scene_parse_error(std::string("scene.shaping: ") + e.what());
        }
    }
    if (root.contains("fusion")) {
        const json& f = root["fusion"];
        require_keys(f, "scene.fusion",
                     {"saturation_threshold", "blend_halfwidth", "epsilon", "gamma"});
        if (f.contains("saturation_threshold"))
            desc.fusion.saturation_threshold = get_number(
                f["saturation_threshold"], "scene.fusion.saturation_threshold");
        if (f.contains("blend_halfwidth"))
            desc.fusion.blend_halfwidth =
                get_number(f["blend_halfwidth"], "scene.fusion.blend_halfwidth");
        if (f.contains("epsilon"))
            desc.fusion.epsilon = get_number(f["epsilon"], "scene.fusion.epsilon");
        if (f.contains("gamma"))
            desc.fusion.transfer.gamma =
                get_number(f["gamma"], "scene.fusion.gamma");
        try {
            desc.fusion.validate();
        } catch (const Error& e) {
            throw scene_parse_error(std::string("scene.fusion: ") + e.what());
        }
    }
    return desc;
}

TracerScene build_tracer_scene(const SceneDescription& desc) {
    std::vector<SceneMesh> meshes;
    for (const ReceiverRef& ref : desc.receiver_meshes) {
        SceneMesh sm;
        sm.mesh = load_obj(ref.path, MeshRole::Receiver);
        sm.mesh.apply_transform(ref.transform);
        meshes.push_back(std::move(sm));
    }
    for (const ObjectRef& ref : desc.object_meshes) {
        SceneMesh sm;
        sm.mesh = load_obj(ref.path, MeshRole::Object);
        sm.mesh.apply_transform(ref.transform);
        sm.material = ref.material;
        meshes.push_back(std::move(sm));
    }
    return TracerScene(std::move(meshes));
}

EquirectEnvMap load_environment(const SceneDescription& desc) {
    return EquirectEnvMap(read_linear_image(desc.environment));
}

}  // namespace relight
