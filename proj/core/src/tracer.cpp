#include "relight/tracer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "relight/radiometry.hpp"

namespace relight {

namespace {
constexpr float kPi = 3.14159265358979323846f;
}

int ray_indicator(RayType type) {
    switch (type) {
        case RayType::Shadow:
        case RayType::Diffuse:
            return 1;
        case RayType::Camera:
        case RayType::Transmission:
        case RayType::Glossy:
            return 0;
    }
    throw invalid_input("invalid ray type");
}

void Material::validate() const {
    auto in01 = [](float v) { return v >= 0.f && v <= 1.f; };
    if (!in01(base_color.x) || !in01(base_color.y) || !in01(base_color.z))
        throw invalid_input("material base_color must lie in [0,1]");
    if (!in01(roughness) || !in01(metallic))
        throw invalid_input("material roughness/metallic must lie in [0,1]");
}

void Camera::validate() const {
    if (width <= 0 || height <= 0)
        throw invalid_input("camera resolution must be positive");
    if (!(vertical_fov > 0.f && vertical_fov < 180.f))
        throw invalid_input("camera fov must lie in (0,180)");
    const Vec3 fwd = look_at - position;
    if (length(fwd) < 1e-9f) throw invalid_input("camera look_at equals position");
    if (length(cross(normalize(fwd), normalize(up))) < 1e-6f)
        throw invalid_input("camera up is parallel to the view direction");
}

TracerScene::TracerScene(std::vector<SceneMesh> meshes)
    : meshes_(std::move(meshes)) {
    std::vector<BvhTriangle> tris;
    for (std::size_t mi = 0; mi < meshes_.size(); ++mi) {
        const TriangleMesh& m = meshes_[mi].mesh;
        m.validate();
        if (m.role == MeshRole::Object) {
            meshes_[mi].material.validate();
            ++object_count_;
        } else {
            ++receiver_count_;
        }
        for (std::size_t t = 0; t < m.triangle_count(); ++t) {
            BvhTriangle bt;
            bt.p0 = m.vertices[m.indices[3 * t]];
            bt.p1 = m.vertices[m.indices[3 * t + 1]];
            bt.p2 = m.vertices[m.indices[3 * t + 2]];
            bt.mesh_index = static_cast<std::uint32_t>(mi);
            bt.tri_index = static_cast<std::uint32_t>(t);
            tris.push_back(bt);
        }
    }
    bvh_.build(std::move(tris));
    prim_object_.resize(bvh_.triangles().size());
    for (std::size_t p = 0; p < prim_object_.size(); ++p)
        prim_object_[p] =
            meshes_[bvh_.triangles()[p].mesh_index].mesh.role == MeshRole::Object;
    if (!bvh_.empty()) {
        const float diag = length(bvh_.bounds_max() - bvh_.bounds_min());
        epsilon_ = std::max(1e-6f, 1e-4f * diag);
    }
}

const Material& TracerScene::prim_material(std::uint32_t prim) const {
    return meshes_[bvh_.triangles()[prim].mesh_index].material;
}

Vec3 TracerScene::prim_albedo(std::uint32_t prim, float u, float v) const {
    const BvhTriangle& bt = bvh_.triangles()[prim];
    const TriangleMesh& m = meshes_[bt.mesh_index].mesh;
    if (!m.has_vertex_colors()) return {1, 1, 1};
    const Vec3& c0 = m.vertex_colors[m.indices[3 * bt.tri_index]];
    const Vec3& c1 = m.vertex_colors[m.indices[3 * bt.tri_index + 1]];
    const Vec3& c2 = m.vertex_colors[m.indices[3 * bt.tri_index + 2]];
    return c0 * (1.f - u - v) + c1 * u + c2 * v;
}

namespace {

// Which ray types a receiver surface interacts with. Diffuse transport and
// primary visibility treat the receiver as an opaque Lambertian catcher;
// shadow, glossy and transmission rays travel through it unchanged so that
// environment light reaches the interior of watertight reconstructions and
// reflections show the environment rather than the proxy mesh. Objects are
// opaque to every ray type.
bool receiver_interacts(RayType type) {
    return type == RayType::Camera || type == RayType::Diffuse;
}

float power_heuristic(float pf, float pg) {
    const float f2 = pf * pf, g2 = pg * pg;
    return f2 + g2 > 0.f ? f2 / (f2 + g2) : 0.f;
}

Vec3 cosine_sample(const Vec3& n, float u1, float u2) {
    const float r = std::sqrt(u1);
    const float phi = 2.f * kPi * u2;
    Vec3 t, b;
    orthonormal_basis(n, t, b);
    const float z = std::sqrt(std::max(0.f, 1.f - u1));
    return t * (r * std::cos(phi)) + b * (r * std::sin(phi)) + n * z;
}

float ggx_d(float cos_h, float alpha) {
    const float a2 = alpha * alpha;
    const float d = cos_h * cos_h * (a2 - 1.f) + 1.f;
    return a2 / (kPi * d * d);
}

float ggx_g1(float cos_v, float alpha) {
    const float a2 = alpha * alpha;
    return 2.f * cos_v /
           (cos_v + std::sqrt(a2 + (1.f - a2) * cos_v * cos_v));
}

struct SurfaceInteraction {
    Vec3 position;
    Vec3 normal;       // flipped toward the incoming ray (two-sided shading)
    Vec3 albedo;       // vertex color (receiver) or base color (object)
    bool is_object = false;
    float roughness = 0.5f;
    float metallic = 0.f;
};

// Evaluates the surface BSDF (Lambertian for receivers, Lambertian+GGX for
// objects) for a known outgoing/incoming pair. Returns f and the sampling pdf.
Vec3 bsdf_eval(const SurfaceInteraction& si, const Vec3& wo, const Vec3& wi,
               float& pdf) {
    const float cos_i = dot(wi, si.normal);
    const float cos_o = dot(wo, si.normal);
    pdf = 0.f;
    if (cos_i <= 0.f || cos_o <= 0.f) return {0, 0, 0};

    const float kd = si.is_object ? 1.f - si.metallic : 1.f;
    const float ks = 1.f - kd;
    Vec3 f = si.albedo * (kd / kPi);
    pdf = kd * cos_i / kPi;
    if (ks > 0.f) {
        const Vec3 h = normalize(wi + wo);
        const float cos_h = std::max(0.f, dot(h, si.normal));
        const float alpha = std::max(1e-3f, si.roughness * si.roughness);
        const float d = ggx_d(cos_h, alpha);
        const float g = ggx_g1(cos_i, alpha) * ggx_g1(cos_o, alpha);
        const float hdoto = std::max(1e-6f, dot(h, wo));
        const Vec3 f0 = si.albedo;
        const Vec3 fresnel =
            f0 + (Vec3{1, 1, 1} - f0) * std::pow(1.f - std::min(1.f, hdoto), 5.f);
        f += fresnel * (ks * d * g / (4.f * cos_i * cos_o));
        pdf += ks * d * cos_h / (4.f * hdoto);
    }
    return f;
}

// Samples a scatter direction; fills f, pdf and the lobe's semantic ray type.
bool bsdf_sample(const SurfaceInteraction& si, const Vec3& wo, float u0, float u1,
                 float u2, Vec3& wi, Vec3& f, float& pdf, RayType& type) {
    const float kd = si.is_object ? 1.f - si.metallic : 1.f;
    if (u0 < kd || kd >= 1.f) {
        wi = cosine_sample(si.normal, u1, u2);
        type = RayType::Diffuse;
    } else {
        const float alpha = std::max(1e-3f, si.roughness * si.roughness);
        const float cos_h =
            std::sqrt(std::max(0.f, (1.f - u1) / (1.f + (alpha * alpha - 1.f) * u1)));
        const float sin_h = std::sqrt(std::max(0.f, 1.f - cos_h * cos_h));
        const float phi = 2.f * kPi * u2;
        Vec3 t, b;
        orthonormal_basis(si.normal, t, b);
        const Vec3 h = t * (sin_h * std::cos(phi)) + b * (sin_h * std::sin(phi)) +
                       si.normal * cos_h;
        wi = h * (2.f * dot(wo, h)) - wo;
        type = RayType::Glossy;
    }
    if (dot(wi, si.normal) <= 0.f) return false;
    f = bsdf_eval(si, wo, wi, pdf);
    return pdf > 0.f;
}

}  // namespace

Vec3 trace_path(const TracerScene& scene, const RenderSettings& settings,
                const EnvSampler& sampler, const Ray& primary,
                SampleStream& stream, bool include_object,
                RenderDiagnostics* diag, bool* primary_hit_object) {
    const Bvh& bvh = scene.bvh();
    if (primary_hit_object) *primary_hit_object = false;

    Vec3 radiance{0, 0, 0};
    Vec3 throughput{1, 1, 1};
    Ray ray = primary;
    float prev_bsdf_pdf = 0.f;

    for (;;) {
        const RayType type = ray.type;
        auto accept = [&](std::uint32_t p) {
            if (scene.prim_is_object(p)) return include_object;
            return receiver_interacts(type);
        };
        TriangleHit hit;
        const bool found = bvh.intersect(ray.origin, ray.direction, 0.f, 1e30f,
                                         accept, hit);
        if (!found) {
            const Vec3 env = sample_env(settings.env, ray.direction);
            float weight = 1.f;
            if (ray.depth > 0 && !settings.bsdf_only)
                weight = power_heuristic(prev_bsdf_pdf, sampler.pdf(ray.direction));
            radiance += throughput * env * weight;
            break;
        }

        if (ray.depth == 0 && primary_hit_object)
            *primary_hit_object = scene.prim_is_object(hit.prim);

        SurfaceInteraction si;
        const BvhTriangle& tri = bvh.triangles()[hit.prim];
        si.position = ray.origin + ray.direction * hit.t;
        Vec3 n = normalize(cross(tri.p1 - tri.p0, tri.p2 - tri.p0));
        if (dot(n, ray.direction) > 0.f) n = -n;
        si.normal = n;
        si.is_object = scene.prim_is_object(hit.prim);
        if (si.is_object) {
            const Material& mat = scene.prim_material(hit.prim);
            si.albedo = mat.base_color;
            si.roughness = mat.roughness;
            si.metallic = mat.metallic;
        } else {
            si.albedo = scene.prim_albedo(hit.prim, hit.u, hit.v);
        }

        if (ray.depth + 1 > settings.max_depth) break;
        stream.set_bounce(static_cast<std::uint32_t>(ray.depth) + 1);
        const Vec3 wo = -ray.direction;
        const Vec3 scatter_origin = si.position + si.normal * scene.epsilon();

        // Next-event estimation against the environment.
        if (!settings.bsdf_only) {
            const float u1 = stream.next();
            const float u2 = stream.next();
            float light_pdf = 0.f;
            const Vec3 wi = sampler.sample(u1, u2, light_pdf);
            const float cos_i = dot(wi, si.normal);
            if (light_pdf > 0.f && cos_i > 0.f) {
                float bsdf_pdf = 0.f;
                const Vec3 f = bsdf_eval(si, wo, wi, bsdf_pdf);
                if (max_component(f) > 0.f) {
                    // Shadow rays are only occluded by object geometry.
                    auto occludes = [&](std::uint32_t p) {
                        return scene.prim_is_object(p) && include_object;
                    };
                    if (!bvh.any_hit(scatter_origin, wi, 0.f, 1e30f, occludes)) {
                        const float w = power_heuristic(light_pdf, bsdf_pdf);
                        radiance += throughput * f * sample_env(settings.env, wi) *
                                    (cos_i / light_pdf * w);
                    }
                }
            }
        }

        // BSDF-sampled continuation.
        const float u0 = stream.next();
        const float u1 = stream.next();
        const float u2 = stream.next();
        Vec3 wi, f;
        float pdf = 0.f;
        RayType next_type = RayType::Diffuse;
        if (!bsdf_sample(si, wo, u0, u1, u2, wi, f, pdf, next_type)) break;
        throughput = throughput * f * (dot(wi, si.normal) / pdf);
        if (max_component(throughput) <= 0.f) break;
        prev_bsdf_pdf = pdf;
        ray = Ray{scatter_origin, wi, next_type, ray.depth + 1};
    }

    if (!std::isfinite(radiance.x) || !std::isfinite(radiance.y) ||
        !std::isfinite(radiance.z)) {
        if (diag) ++diag->nan_events;
        return {0, 0, 0};
    }
    return radiance;
}

namespace {

struct ViewBasis {
    Vec3 origin, forward, right, up;
    float tan_half_fov_y = 1.f;
    float aspect = 1.f;
};

ViewBasis camera_basis(const Camera& cam) {
    cam.validate();
    ViewBasis vb;
    vb.origin = cam.position;
    vb.forward = normalize(cam.look_at - cam.position);
    vb.right = normalize(cross(vb.forward, cam.up));
    vb.up = cross(vb.right, vb.forward);
    vb.tan_half_fov_y = std::tan(cam.vertical_fov * kPi / 360.f);
    vb.aspect = static_cast<float>(cam.width) / cam.height;
    return vb;
}

LinearImage render_basis(const TracerScene& scene, const ViewBasis& vb, int width,
                         int height, const RenderSettings& settings,
                         bool include_object, RenderLayer layer,
                         RenderDiagnostics* diag) {
    const int channels = layer == RenderLayer::ObjectOnly ? 4 : 3;
    LinearImage out(width, height, channels);
    const EnvSampler sampler(settings.env);
    const float inv_spp = 1.f / settings.samples_per_pixel;

    std::atomic<int> next_row{0};
    std::atomic<std::uint64_t> nan_total{0};
    auto worker = [&]() {
        RenderDiagnostics local;
        for (;;) {
            const int y = next_row.fetch_add(1);
            if (y >= height) break;
            for (int x = 0; x < width; ++x) {
                const std::uint64_t pixel =
                    static_cast<std::uint64_t>(y) * width + x;
                Vec3 acc{0, 0, 0};
                float alpha = 0.f;
                for (int s = 0; s < settings.samples_per_pixel; ++s) {
                    SampleStream stream(settings.seed, pixel,
                                        static_cast<std::uint64_t>(s));
                    stream.set_bounce(0);
                    const float jx = stream.next();
                    const float jy = stream.next();
                    const float sx =
                        (2.f * (x + jx) / width - 1.f) * vb.tan_half_fov_y * vb.aspect;
                    const float sy =
                        (1.f - 2.f * (y + jy) / height) * vb.tan_half_fov_y;
                    const Ray primary{
                        vb.origin,
                        normalize(vb.forward + vb.right * sx + vb.up * sy),
                        RayType::Camera, 0};
                    bool hit_object = false;
                    const Vec3 L =
                        trace_path(scene, settings, sampler, primary, stream,
                                   include_object, &local,
                                   layer == RenderLayer::ObjectOnly ? &hit_object
                                                                    : nullptr);
                    if (layer == RenderLayer::ObjectOnly) {
                        if (hit_object) {
                            acc += L;
                            alpha += 1.f;
                        }
                    } else {
                        acc += L;
                    }
                }
                out.set_rgb(x, y, acc * inv_spp);
                if (channels == 4) out.at(x, y, 3) = alpha * inv_spp;
            }
        }
        nan_total.fetch_add(local.nan_events);
    };

    const int threads = std::max(1, settings.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (diag) diag->nan_events += nan_total.load();
    return out;
}

}  // namespace

LinearImage render_view(const TracerScene& scene, const Camera& camera,
                        const RenderSettings& settings, bool include_object,
                        RenderLayer layer, RenderDiagnostics* diag) {
    if (settings.samples_per_pixel < 1 || settings.max_depth < 1)
        throw invalid_input("render settings require spp >= 1 and max_depth >= 1");
    const ViewBasis vb = camera_basis(camera);
    return render_basis(scene, vb, camera.width, camera.height, settings,
                        include_object, layer, diag);
}

InsertionRenderSet render_insertion_set(const TracerScene& scene,
                                        const Camera& camera,
                                        const RenderSettings& settings,
                                        RenderDiagnostics* diag) {
    if (!scene.has_receivers() || !scene.has_objects())
        throw invalid_input(
            "insertion render needs at least one receiver and one object mesh");
    InsertionRenderSet out;
    out.r0 = render_view(scene, camera, settings, false, RenderLayer::Full, diag);
    out.r1 = render_view(scene, camera, settings, true, RenderLayer::Full, diag);
    out.object_layer =
        render_view(scene, camera, settings, true, RenderLayer::ObjectOnly, diag);
    return out;
}

CubemapFaceSet render_cubemap_at_linear(const TracerScene& scene, const Vec3& point,
                                        int face_resolution,
                                        const RenderSettings& settings) {
    if (face_resolution <= 0)
        throw invalid_input("cubemap face resolution must be positive");
    CubemapFaceSet faces;
    for (int fi = 0; fi < 6; ++fi) {
        const FaceBasis fb = face_basis(static_cast<CubeFace>(fi));
        ViewBasis vb;
        vb.origin = point;
        vb.forward = fb.forward;
        vb.right = fb.right;
        vb.up = fb.up;
        vb.tan_half_fov_y = 1.f;  // 90 degree FOV
        vb.aspect = 1.f;
        // Mix the face index into the seed so faces draw independent samples.
        RenderSettings face_settings = settings;
        face_settings.seed = mix64(settings.seed) + static_cast<std::uint64_t>(fi);
        faces.faces[fi] =
            render_basis(scene, vb, face_resolution, face_resolution,
                         face_settings, false, RenderLayer::Full, nullptr);
    }
    return faces;
}

CubemapFaceSet render_cubemap_at(const TracerScene& scene, const Vec3& point,
                                 int face_resolution,
                                 const RenderSettings& settings) {
    CubemapFaceSet linear = render_cubemap_at_linear(scene, point, face_resolution,
                                                     settings);
    for (auto& face : linear.faces) {
        LinearImage img;
        static_cast<ImageBuffer&>(img) = std::move(face);
        face = linear_to_srgb(img);
    }
    return linear;
}

}  // namespace relight
