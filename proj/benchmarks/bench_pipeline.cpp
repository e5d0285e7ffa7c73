// Microbenchmarks for the hot paths: panorama stitching, exposure fusion,
// environment importance sampling, path-traced insertion rendering and
// shadow compositing.

#include <benchmark/benchmark.h>

#include <cmath>

#include "relight/compositor.hpp"
#include "relight/env_sampler.hpp"
#include "relight/fusion.hpp"
#include "relight/mesh.hpp"
#include "relight/panorama.hpp"
#include "relight/radiometry.hpp"
#include "relight/tracer.hpp"

namespace {

using namespace relight;

LinearImage analytic_env(int width, int height) {
    LinearImage img(width, height, 3);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const Vec3 d = dir_from_equirect((x + 0.5f) / width,
                                             (y + 0.5f) / height);
            img.set_rgb(x, y, {0.5f + 0.45f * d.x, 0.5f + 0.45f * d.y,
                               0.5f + 0.45f * d.z});
        }
    return img;
}

CubemapFaceSet analytic_cubemap(int resolution) {
    CubemapFaceSet set;
    for (int fi = 0; fi < 6; ++fi) {
        const FaceBasis fb = face_basis(static_cast<CubeFace>(fi));
        ImageBuffer face(resolution, resolution, 3);
        for (int y = 0; y < resolution; ++y)
            for (int x = 0; x < resolution; ++x) {
                const float a = 2.f * (x + 0.5f) / resolution - 1.f;
                const float b = 1.f - 2.f * (y + 0.5f) / resolution;
                const Vec3 d = normalize(fb.forward + fb.right * a + fb.up * b);
                face.set_rgb(x, y, {0.5f + 0.45f * d.x, 0.5f + 0.45f * d.y,
                                    0.5f + 0.45f * d.z});
            }
        set.faces[fi] = face;
    }
    return set;
}

void bench_stitch(benchmark::State& state) {
    const int res = static_cast<int>(state.range(0));
    const CubemapFaceSet faces = analytic_cubemap(res);
    for (auto _ : state) {
        ImageBuffer pano = stitch_cubemap(faces, 4 * res);
        benchmark::DoNotOptimize(pano.data.data());
    }
    state.SetItemsProcessed(state.iterations() * 4 * res * 2 * res);
}
BENCHMARK(bench_stitch)->Arg(64)->Arg(256);

void bench_fuse(benchmark::State& state) {
    const int width = static_cast<int>(state.range(0));
    const LinearImage hdr = analytic_env(width, width / 2);
    BracketSequence seq;
    for (float ev : {-6.f, -3.f, 0.f}) {
        BracketEntry e;
        e.ev = ev;
        e.image = simulate_underexposure(hdr, ev);
        seq.entries.push_back(std::move(e));
    }
    for (auto _ : state) {
        FusedHdr fused = fuse_brackets(seq, {});
        benchmark::DoNotOptimize(fused.map.image.data.data());
    }
    state.SetItemsProcessed(state.iterations() * width * (width / 2));
}
BENCHMARK(bench_fuse)->Arg(256)->Arg(1024);

void bench_env_sampler_build(benchmark::State& state) {
    const int width = static_cast<int>(state.range(0));
    const EquirectEnvMap env(analytic_env(width, width / 2));
    for (auto _ : state) {
        EnvSampler sampler(env);
        benchmark::DoNotOptimize(&sampler);
    }
}
BENCHMARK(bench_env_sampler_build)->Arg(256)->Arg(1024);

void bench_env_sampler_draw(benchmark::State& state) {
    const EquirectEnvMap env(analytic_env(512, 256));
    const EnvSampler sampler(env);
    float u = 0.123f, v = 0.456f;
    for (auto _ : state) {
        float pdf = 0.f;
        const Vec3 d = sampler.sample(u, v, pdf);
        benchmark::DoNotOptimize(d);
        benchmark::DoNotOptimize(pdf);
        u = std::fmod(u + 0.61803f, 1.f);
        v = std::fmod(v + 0.38197f, 1.f);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bench_env_sampler_draw);

TracerScene demo_scene() {
    SceneMesh floor;
    floor.mesh = make_quad({-2.f, 0.f, -2.f}, {4.f, 0.f, 0.f}, {0.f, 0.f, 4.f},
                           {0.7f, 0.7f, 0.7f}, MeshRole::Receiver);
    SceneMesh cube;
    cube.mesh = make_box({-0.4f, 0.f, -0.4f}, {0.4f, 0.8f, 0.4f},
                         {0.6f, 0.2f, 0.2f}, MeshRole::Object, false);
    cube.material.base_color = {0.6f, 0.2f, 0.2f};
    cube.material.roughness = 0.6f;
    return TracerScene({floor, cube});
}

void bench_render_insertion(benchmark::State& state) {
    const TracerScene scene = demo_scene();
    Camera cam;
    cam.position = {0.f, 3.f, 0.001f};
    cam.look_at = {0.f, 0.f, 0.f};
    cam.vertical_fov = 40.f;
    cam.width = 64;
    cam.height = 48;
    RenderSettings settings;
    settings.samples_per_pixel = static_cast<int>(state.range(0));
    settings.max_depth = 3;
    settings.seed = 7;
    settings.threads = static_cast<int>(state.range(1));
    settings.env = EquirectEnvMap(analytic_env(64, 32));
    for (auto _ : state) {
        InsertionRenderSet set = render_insertion_set(scene, cam, settings);
        benchmark::DoNotOptimize(set.r1.data.data());
    }
    state.SetItemsProcessed(state.iterations() * cam.width * cam.height *
                            settings.samples_per_pixel);
}
BENCHMARK(bench_render_insertion)
    ->Args({4, 1})
    ->Args({4, 4})
    ->Args({16, 4})
    ->Unit(benchmark::kMillisecond);

void bench_composite(benchmark::State& state) {
    const int w = static_cast<int>(state.range(0)), h = w * 3 / 4;
    CompositeInputs in;
    in.r0 = LinearImage(w, h, 3, 0.5f);
    in.r1 = LinearImage(w, h, 3, 0.25f);
    in.background = SrgbImage(w, h, 3, 0.6f);
    in.object_layer = LinearImage(w, h, 4, 0.f);
    const ShapingParams p;
    for (auto _ : state) {
        SrgbImage out = composite(in, shape_ratio(shadow_ratio(in.r0, in.r1, p), p), p);
        benchmark::DoNotOptimize(out.data.data());
    }
    state.SetItemsProcessed(state.iterations() * w * h);
}
BENCHMARK(bench_composite)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
