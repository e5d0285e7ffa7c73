#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "relight/mesh.hpp"
#include "relight/radiometry.hpp"
#include "relight/tracer.hpp"
#include "test_support.hpp"

using namespace relight;
using namespace testsupport;

namespace {

SceneMesh receiver(TriangleMesh mesh) {
    SceneMesh sm;
    sm.mesh = std::move(mesh);
    return sm;
}

SceneMesh object(TriangleMesh mesh, const Material& mat = {}) {
    SceneMesh sm;
    sm.mesh = std::move(mesh);
    sm.material = mat;
    return sm;
}

// Floor quad in the x-z plane centered at the origin.
TriangleMesh floor_quad(float half, const Vec3& color) {
    return make_quad({-half, 0.f, -half}, {2.f * half, 0.f, 0.f},
                     {0.f, 0.f, 2.f * half}, color, MeshRole::Receiver);
}

Camera down_camera(int w, int h, float height = 3.f, float fov = 40.f) {
    Camera cam;
    cam.position = {0.f, height, 0.f};
    cam.look_at = {0.f, 0.f, 0.f};
    cam.up = {0.f, 0.f, -1.f};
    cam.vertical_fov = fov;
    cam.width = w;
    cam.height = h;
    return cam;
}

double mean_luminance(const LinearImage& img) {
    double sum = 0.0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const Vec3 c = img.rgb(x, y);
            sum += 0.21267 * c.x + 0.71516 * c.y + 0.07217 * c.z;
        }
    return sum / img.pixel_count();
}

}  // namespace

TEST_CASE("ray indicator follows the type partition") {
    CHECK(ray_indicator(RayType::Shadow) == 1);
    CHECK(ray_indicator(RayType::Diffuse) == 1);
    CHECK(ray_indicator(RayType::Camera) == 0);
    CHECK(ray_indicator(RayType::Glossy) == 0);
    CHECK(ray_indicator(RayType::Transmission) == 0);
}

TEST_CASE("empty scene returns the environment lookup") {
    TracerScene scene({});
    RenderSettings settings;
    settings.env = EquirectEnvMap(
        analytic_equirect(16, 8, [](const Vec3& d) { return smooth_rgb(d); }));
    const EnvSampler sampler(settings.env);
    std::mt19937 rng(3);
    std::uniform_real_distribution<float> uni(0.f, 1.f);
    for (int i = 0; i < 50; ++i) {
        float u, v;
        u = uni(rng);
        v = uni(rng);
        const Vec3 d = dir_from_equirect(u, v);
        SampleStream stream(1, i, 0);
        const Vec3 L = trace_path(scene, settings, sampler,
                                  Ray{{0, 0, 0}, d, RayType::Camera, 0}, stream,
                                  true);
        const Vec3 ref = sample_env(settings.env, d);
        CHECK(L.x == doctest::Approx(ref.x).epsilon(1e-6));
        CHECK(L.y == doctest::Approx(ref.y).epsilon(1e-6));
        CHECK(L.z == doctest::Approx(ref.z).epsilon(1e-6));
    }
}

TEST_CASE("black albedo floor absorbs everything") {
    TracerScene scene({receiver(floor_quad(5.f, {0, 0, 0}))});
    RenderSettings settings;
    settings.samples_per_pixel = 4;
    settings.env = EquirectEnvMap(LinearImage(8, 4, 3, 1.f));
    const LinearImage img =
        render_view(scene, down_camera(8, 8), settings, false);
    for (float v : img.data) CHECK(v == 0.f);
}

TEST_CASE("renders are deterministic for a fixed seed") {
    TracerScene scene({receiver(floor_quad(3.f, {0.7f, 0.6f, 0.5f})),
                       object(make_box({-0.4f, 0.f, -0.4f}, {0.4f, 0.8f, 0.4f},
                                       {1, 1, 1}, MeshRole::Object, false))});
    RenderSettings settings;
    settings.samples_per_pixel = 8;
    settings.seed = 42;
    settings.env = cap_environment(16, 8, {0.2f, 1.f, 0.1f}, 0.4f, 10.f, 0.05f);

    const LinearImage a = render_view(scene, down_camera(16, 12), settings, true);
    const LinearImage b = render_view(scene, down_camera(16, 12), settings, true);
    CHECK(std::memcmp(a.data.data(), b.data.data(),
                      a.data.size() * sizeof(float)) == 0);

    // Bit-identical across thread counts.
    RenderSettings mt = settings;
    mt.threads = 4;
    const LinearImage c = render_view(scene, down_camera(16, 12), mt, true);
    CHECK(std::memcmp(a.data.data(), c.data.data(),
                      a.data.size() * sizeof(float)) == 0);
}

TEST_CASE("include_object flag is inert without objects") {
    TracerScene scene({receiver(floor_quad(3.f, {0.7f, 0.7f, 0.7f}))});
    RenderSettings settings;
    settings.samples_per_pixel = 4;
    settings.env = EquirectEnvMap(LinearImage(8, 4, 3, 0.5f));
    const LinearImage without =
        render_view(scene, down_camera(8, 8), settings, false);
    const LinearImage with =
        render_view(scene, down_camera(8, 8), settings, true);
    CHECK(std::memcmp(without.data.data(), with.data.data(),
                      with.data.size() * sizeof(float)) == 0);
}

TEST_CASE("rendering is linear in the environment") {
    TracerScene scene({receiver(floor_quad(3.f, {0.6f, 0.7f, 0.8f})),
                       object(make_box({-0.3f, 0.f, -0.3f}, {0.3f, 0.6f, 0.3f},
                                       {1, 1, 1}, MeshRole::Object, false),
                              Material{{0.5f, 0.4f, 0.3f}, 0.4f, 0.3f})});
    RenderSettings settings;
    settings.samples_per_pixel = 8;
    settings.seed = 9;
    settings.env = cap_environment(16, 8, {0.1f, 1.f, 0.3f}, 0.5f, 6.f, 0.1f);
    const LinearImage base =
        render_view(scene, down_camera(12, 12), settings, true);

    RenderSettings scaled = settings;
    LinearImage env4 = settings.env.image;
    for (float& v : env4.data) v *= 4.f;  // power of two keeps sampling exact
    scaled.env = EquirectEnvMap(std::move(env4));
    const LinearImage quad =
        render_view(scene, down_camera(12, 12), scaled, true);
    for (std::size_t i = 0; i < base.data.size(); ++i)
        CHECK(quad.data[i] ==
              doctest::Approx(4.f * base.data[i]).epsilon(1e-5));
}

TEST_CASE("NEE with MIS agrees with pure BSDF sampling") {
    const EquirectEnvMap cap_env =
        cap_environment(16, 8, {0.2f, 1.f, -0.3f}, 0.6f, 4.f, 0.3f);
    std::vector<TracerScene> scenes;
    scenes.emplace_back(std::vector<SceneMesh>{
        receiver(floor_quad(3.f, {0.7f, 0.7f, 0.7f})),
        object(make_box({-0.4f, 0.f, -0.4f}, {0.4f, 0.8f, 0.4f}, {1, 1, 1},
                        MeshRole::Object, false))});
    scenes.emplace_back(std::vector<SceneMesh>{
        receiver(floor_quad(3.f, {0.5f, 0.6f, 0.7f})),
        object(make_uv_sphere({0.f, 0.6f, 0.f}, 0.5f, 24, 12, {1, 1, 1},
                              MeshRole::Object),
               Material{{0.8f, 0.7f, 0.6f}, 0.8f, 0.f})});
    scenes.emplace_back(std::vector<SceneMesh>{
        receiver(floor_quad(3.f, {0.6f, 0.6f, 0.6f})),
        object(make_uv_sphere({0.f, 0.6f, 0.f}, 0.5f, 24, 12, {1, 1, 1},
                              MeshRole::Object),
               Material{{0.9f, 0.8f, 0.6f}, 0.3f, 0.8f})});

    for (const TracerScene& scene : scenes) {
        // K independent short renders per estimator; compare the two means
        // against the combined standard error.
        const int kRuns = 6;
        auto collect = [&](bool bsdf_only, std::uint64_t seed_base) {
            std::vector<double> means;
            for (int k = 0; k < kRuns; ++k) {
                RenderSettings s;
                s.samples_per_pixel = 32;
                s.max_depth = 3;
                s.seed = seed_base + static_cast<std::uint64_t>(k);
                s.bsdf_only = bsdf_only;
                s.env = cap_env;
                s.threads = 4;
                means.push_back(mean_luminance(
                    render_view(scene, down_camera(16, 16), s, true)));
            }
            return means;
        };
        const std::vector<double> mis = collect(false, 1000);
        const std::vector<double> bsdf = collect(true, 2000);
        auto stats = [&](const std::vector<double>& v, double& mean,
                         double& var) {
            mean = 0.0;
            for (double x : v) mean += x;
            mean /= v.size();
            var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            var /= (v.size() - 1);
        };
        double m0, v0, m1, v1;
        stats(mis, m0, v0);
        stats(bsdf, m1, v1);
        const double sigma = std::sqrt(v0 / kRuns + v1 / kRuns);
        CHECK(std::fabs(m0 - m1) <= 2.0 * std::max(sigma, 1e-4));
    }
}

TEST_CASE("insertion set shares sample streams") {
    // Object far below the floor: no camera or bounce path can touch it.
    TracerScene scene({receiver(floor_quad(3.f, {0.7f, 0.7f, 0.7f})),
                       object(make_box({10.f, -20.f, 10.f}, {11.f, -19.f, 11.f},
                                       {1, 1, 1}, MeshRole::Object, false))});
    RenderSettings settings;
    settings.samples_per_pixel = 8;
    settings.seed = 77;
    settings.env = cap_environment(16, 8, {0.f, 1.f, 0.f}, 0.5f, 5.f, 0.1f);
    const InsertionRenderSet set =
        render_insertion_set(scene, down_camera(16, 12, 3.f, 30.f), settings);
    CHECK(std::memcmp(set.r0.data.data(), set.r1.data.data(),
                      set.r0.data.size() * sizeof(float)) == 0);
    for (int y = 0; y < set.object_layer.height; ++y)
        for (int x = 0; x < set.object_layer.width; ++x)
            CHECK(set.object_layer.at(x, y, 3) == 0.f);
}

TEST_CASE("occluder darkens the shadow footprint") {
    TracerScene scene({receiver(floor_quad(3.f, {0.7f, 0.7f, 0.7f})),
                       object(make_box({-0.4f, 0.f, -0.4f}, {0.4f, 0.8f, 0.4f},
                                       {0.8f, 0.2f, 0.2f}, MeshRole::Object,
                                       false))});
    RenderSettings settings;
    settings.samples_per_pixel = 32;
    settings.seed = 5;
    settings.threads = 4;
    settings.env = cap_environment(32, 16, {0.3f, 1.f, 0.2f}, 0.25f, 30.f, 0.02f);
    const InsertionRenderSet set =
        render_insertion_set(scene, down_camera(32, 32), settings);
    // Compare only where the floor stays visible: pixels covered by the
    // object trade floor for (possibly brighter) lit cube faces.
    double lum0 = 0.0, lum1 = 0.0;
    int floor_pixels = 0;
    for (int y = 0; y < set.r0.height; ++y)
        for (int x = 0; x < set.r0.width; ++x) {
            if (set.object_layer.at(x, y, 3) != 0.f) continue;
            const Vec3 c0 = set.r0.rgb(x, y), c1 = set.r1.rgb(x, y);
            lum0 += 0.21267 * c0.x + 0.71516 * c0.y + 0.07217 * c0.z;
            lum1 += 0.21267 * c1.x + 0.71516 * c1.y + 0.07217 * c1.z;
            ++floor_pixels;
        }
    REQUIRE(floor_pixels > 0);
    CHECK(lum1 < lum0);

    // Object alpha concentrated on the cube, absent at the frame border.
    double border_alpha = 0.0, total_alpha = 0.0;
    for (int y = 0; y < set.object_layer.height; ++y)
        for (int x = 0; x < set.object_layer.width; ++x) {
            const float a = set.object_layer.at(x, y, 3);
            total_alpha += a;
            if (x == 0 || y == 0 || x == set.object_layer.width - 1 ||
                y == set.object_layer.height - 1)
                border_alpha += a;
        }
    CHECK(total_alpha > 0.0);
    CHECK(border_alpha == 0.0);
}

TEST_CASE("cubemap capture round-trips the environment") {
    TracerScene scene({});
    RenderSettings settings;
    settings.samples_per_pixel = 4;
    settings.env = EquirectEnvMap(
        analytic_equirect(128, 64, [](const Vec3& d) { return smooth_rgb(d); }));
    const CubemapFaceSet faces =
        render_cubemap_at_linear(scene, {0, 0, 0}, 64, settings);
    const ImageBuffer pano = stitch_cubemap(faces, 128);
    CHECK(raw_psnr(pano, settings.env.image) >= 35.0);

    // Same seed renders identical faces.
    const CubemapFaceSet again =
        render_cubemap_at_linear(scene, {0, 0, 0}, 64, settings);
    for (int f = 0; f < 6; ++f)
        CHECK(std::memcmp(faces.faces[f].data.data(),
                          again.faces[f].data.data(),
                          faces.faces[f].data.size() * sizeof(float)) == 0);
}

TEST_CASE("tone-mapped cubemap equals linear faces through the transfer") {
    TracerScene scene({});
    RenderSettings settings;
    settings.samples_per_pixel = 2;
    settings.env = cap_environment(16, 8, {0.f, 1.f, 0.f}, 0.6f, 3.f, 0.2f);
    const CubemapFaceSet lin =
        render_cubemap_at_linear(scene, {0, 0, 0}, 16, settings);
    const CubemapFaceSet ldr = render_cubemap_at(scene, {0, 0, 0}, 16, settings);
    for (int f = 0; f < 6; ++f)
        for (std::size_t i = 0; i < ldr.faces[f].data.size(); ++i) {
            const float expect =
                std::pow(std::min(1.f, std::max(0.f, lin.faces[f].data[i])),
                         1.f / 2.4f);
            CHECK(ldr.faces[f].data[i] ==
                  doctest::Approx(expect).epsilon(1e-5));
        }
}

TEST_CASE("insertion set requires both roles") {
    TracerScene scene({receiver(floor_quad(1.f, {0.5f, 0.5f, 0.5f}))});
    RenderSettings settings;
    settings.env = EquirectEnvMap(LinearImage(8, 4, 3, 1.f));
    CHECK_THROWS_AS(render_insertion_set(scene, down_camera(4, 4), settings),
                    Error);
}

TEST_CASE("mesh and camera validation") {
    TriangleMesh bad = floor_quad(1.f, {0.5f, 0.5f, 0.5f});
    bad.indices[0] = 99;  // out of range
    CHECK_THROWS_AS(bad.validate(), Error);

    Camera cam = down_camera(0, 4);
    CHECK_THROWS_AS(cam.validate(), Error);
    cam = down_camera(4, 4);
    cam.up = {0.f, 1.f, 0.f};  // parallel to view direction (looking down)
    CHECK_THROWS_AS(cam.validate(), Error);

    Material mat;
    mat.roughness = 1.5f;
    CHECK_THROWS_AS(mat.validate(), Error);
}
