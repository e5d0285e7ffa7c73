#pragma once

#include <cstdint>
#include <vector>

#include "relight/bvh.hpp"
#include "relight/env_sampler.hpp"
#include "relight/mesh.hpp"
#include "relight/panorama.hpp"
#include "relight/rng.hpp"

namespace relight {

enum class RayType { Camera, Shadow, Diffuse, Glossy, Transmission };

// Binary ray-type indicator: 1 for ray types that interact with receiver
// geometry as an opaque diffuse material, 0 for types that treat it as
// perfectly transparent.
int ray_indicator(RayType type);

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit length
    RayType type = RayType::Camera;
    int depth = 0;
};

struct Material {
    Vec3 base_color{0.8f, 0.8f, 0.8f};
    float roughness = 0.5f;
    float metallic = 0.f;

    void validate() const;
};

struct Camera {
    Vec3 position;
    Vec3 look_at;
    Vec3 up{0, 1, 0};
    float vertical_fov = 45.f;  // degrees
    int width = 0, height = 0;

    void validate() const;
};

struct RenderSettings {
    int samples_per_pixel = 16;
    int max_depth = 4;
    std::uint64_t seed = 0;
    EquirectEnvMap env;
    int threads = 1;
    bool bsdf_only = false;  // disables next-event estimation (variance checks)
};

struct SceneMesh {
    TriangleMesh mesh;
    Material material;  // used for object-role meshes only
};

struct RenderDiagnostics {
    std::uint64_t nan_events = 0;  // non-finite samples clamped to zero
};

// Immutable render-ready scene: one BVH over all meshes with per-primitive
// role/material lookup tables.
class TracerScene {
public:
    explicit TracerScene(std::vector<SceneMesh> meshes);

    const Bvh& bvh() const { return bvh_; }
    bool prim_is_object(std::uint32_t prim) const { return prim_object_[prim]; }
    bool has_objects() const { return object_count_ > 0; }
    bool has_receivers() const { return receiver_count_ > 0; }
    float epsilon() const { return epsilon_; }

    const Material& prim_material(std::uint32_t prim) const;
    // Interpolated vertex color at barycentrics (u, v) of the primitive.
    Vec3 prim_albedo(std::uint32_t prim, float u, float v) const;

private:
    std::vector<SceneMesh> meshes_;
    Bvh bvh_;
    std::vector<std::uint8_t> prim_object_;
    std::size_t object_count_ = 0;
    std::size_t receiver_count_ = 0;
    float epsilon_ = 1e-5f;  // self-intersection offset, 1e-4 x scene diagonal
};

enum class RenderLayer { Full, ObjectOnly };

struct InsertionRenderSet {
    LinearImage r0;  // receiver only
    LinearImage r1;  // receiver + object
    LinearImage object_layer;  // RGBA, premultiplied alpha
};

// Single path-traced radiance estimate for one primary ray.
Vec3 trace_path(const TracerScene& scene, const RenderSettings& settings,
                const EnvSampler& sampler, const Ray& primary,
                SampleStream& stream, bool include_object,
                RenderDiagnostics* diag = nullptr,
                bool* primary_hit_object = nullptr);

LinearImage render_view(const TracerScene& scene, const Camera& camera,
                        const RenderSettings& settings, bool include_object,
                        RenderLayer layer = RenderLayer::Full,
                        RenderDiagnostics* diag = nullptr);

// R0/R1/O rendered from identical per-pixel sample streams, so pixels whose
// paths never touch object geometry are bit-identical between R0 and R1.
InsertionRenderSet render_insertion_set(const TracerScene& scene,
                                        const Camera& camera,
                                        const RenderSettings& settings,
                                        RenderDiagnostics* diag = nullptr);

// Six 90-degree-FOV views along the cube axes from `point`, objects
// excluded. Linear variant keeps HDR radiance; the plain variant tone-maps
// each face to EV0 LDR.
CubemapFaceSet render_cubemap_at_linear(const TracerScene& scene, const Vec3& point,
                                        int face_resolution,
                                        const RenderSettings& settings);
CubemapFaceSet render_cubemap_at(const TracerScene& scene, const Vec3& point,
                                 int face_resolution,
                                 const RenderSettings& settings);

}  // namespace relight
