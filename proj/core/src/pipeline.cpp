#include "relight/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <utility>

#include <json.hpp>

#include "relight/compositor.hpp"
#include "relight/fusion.hpp"
#include "relight/image_io.hpp"
#include "relight/metrics.hpp"
#include "relight/radiometry.hpp"

namespace relight {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Any failure inside a stage aborts the whole run with the stage name
// attached; files written by earlier stages are left in place.
template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw stage_failure(std::string("stage '") + name + "': " + e.what());
    } catch (const std::exception& e) {
        throw stage_failure(std::string("stage '") + name + "': " + e.what());
    }
}

std::string ev_tag(float ev) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%+g", static_cast<double>(ev));
    return buf;
}

LinearImage as_linear(ImageBuffer buf) {
    LinearImage img;
    static_cast<ImageBuffer&>(img) = std::move(buf);
    return img;
}

json shaping_json(const ShapingParams& p) {
    return {{"gamma_s", p.gamma_s},
            {"s_min", p.s_min},
            {"lambda", p.lambda},
            {"epsilon", p.epsilon},
            {"validity_bound", p.validity_bound}};
}

json fusion_json(const FusionParams& p) {
    return {{"saturation_threshold", p.saturation_threshold},
            {"blend_halfwidth", p.blend_halfwidth},
            {"epsilon", p.epsilon},
            {"gamma", p.transfer.gamma}};
}

}  // namespace

PipelineResult run_pipeline(const SceneDescription& scene,
                            const PipelineOptions& options,
                            const std::string& out_dir) {
    if (options.panorama_width < 4 || options.panorama_width % 2 != 0)
        throw invalid_input("panorama width must be an even number >= 4");
    if (options.cubemap_resolution < 2)
        throw invalid_input("cubemap resolution must be >= 2");
    if (options.threads < 1) throw invalid_input("thread count must be >= 1");
    if (options.mode == BracketMode::External && options.external_brackets.empty())
        throw invalid_input("external bracket mode needs at least one bracket");
    if (!options.reference_images.empty() &&
        options.reference_images.size() != scene.cameras.size())
        throw invalid_input("need exactly one reference image per camera");

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw io_error("cannot create output directory: " + out_dir);
    const fs::path out(out_dir);

    RenderSettings settings = scene.render;
    if (options.seed_override) settings.seed = *options.seed_override;
    settings.threads = options.threads;

    PipelineResult result;
    json manifest;
    manifest["seed"] = settings.seed;
    manifest["threads"] = settings.threads;
    manifest["bracket_mode"] =
        options.mode == BracketMode::Oracle ? "oracle" : "external";
    manifest["parameters"] = {
        {"samples_per_pixel", settings.samples_per_pixel},
        {"max_depth", settings.max_depth},
        {"cubemap_resolution", options.cubemap_resolution},
        {"panorama_width", options.panorama_width},
        {"shaping", shaping_json(scene.shaping)},
        {"fusion", fusion_json(scene.fusion)},
    };

    const TracerScene tracer_scene =
        stage("scene", [&] { return build_tracer_scene(scene); });
    settings.env = stage("environment", [&] { return load_environment(scene); });

    // Probe capture: light the receiver scene with the original environment
    // and photograph the surroundings from the insertion point.
    const CubemapFaceSet probe = stage("cubemap", [&] {
        return render_cubemap_at_linear(tracer_scene, scene.insertion_point,
                                        options.cubemap_resolution, settings);
    });
    json face_paths = json::object();
    stage("cubemap", [&] {
        for (int f = 0; f < 6; ++f) {
            const CubeFace face = static_cast<CubeFace>(f);
            const fs::path p =
                out / (std::string("face_") + face_name(face) + ".exr");
            write_exr(p.string(), as_linear(probe[face]));
            face_paths[face_name(face)] = p.string();
        }
    });
    manifest["stages"]["cubemap"] = face_paths;

    const LinearImage pano_hdr = stage("stitch", [&] {
        LinearImage pano =
            as_linear(stitch_cubemap(probe, options.panorama_width));
        write_exr((out / "panorama_hdr.exr").string(), pano);
        write_png((out / "panorama_ev0.png").string(),
                  simulate_underexposure(pano, 0.f, scene.fusion.transfer));
        return pano;
    });
    manifest["stages"]["stitch"] = {
        {"hdr", (out / "panorama_hdr.exr").string()},
        {"ldr", (out / "panorama_ev0.png").string()},
    };

    const BracketSequence brackets = stage("brackets", [&] {
        BracketSequence seq;
        if (options.mode == BracketMode::Oracle) {
            std::vector<float> evs = options.oracle_evs;
            evs.push_back(0.f);
            std::sort(evs.begin(), evs.end());
            evs.erase(std::unique(evs.begin(), evs.end()), evs.end());
            for (float ev : evs) {
                BracketEntry entry;
                entry.ev = ev;
                entry.image =
                    simulate_underexposure(pano_hdr, ev, scene.fusion.transfer);
                const fs::path p = out / ("bracket_ev" + ev_tag(ev) + ".png");
                write_png(p.string(), entry.image);
                seq.entries.push_back(std::move(entry));
            }
        } else {
            auto sorted = options.external_brackets;
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& a, const auto& b) {
                          return a.second < b.second;
                      });
            for (const auto& [path, ev] : sorted) {
                BracketEntry entry;
                entry.ev = ev;
                entry.image = read_png(path);
                seq.entries.push_back(std::move(entry));
            }
        }
        seq.validate();
        return seq;
    });
    json bracket_list = json::array();
    for (const auto& e : brackets.entries)
        bracket_list.push_back({{"ev", e.ev}});
    manifest["stages"]["brackets"] = bracket_list;

    const FusedHdr fused =
        stage("fuse", [&] { return fuse_brackets(brackets, scene.fusion); });
    result.fused_path = (out / "fused.exr").string();
    result.dynamic_range_stops = fused.dynamic_range_stops;
    stage("fuse", [&] { write_exr(result.fused_path, fused.map.image); });
    manifest["stages"]["fuse"] = {
        {"path", result.fused_path},
        {"dynamic_range_stops", fused.dynamic_range_stops},
    };

    // Insertion renders are lit by the reconstructed environment.
    settings.env = fused.map;

    json views = json::array();
    for (std::size_t ci = 0; ci < scene.cameras.size(); ++ci) {
        const Camera& cam = scene.cameras[ci];
        const std::string tag = "cam" + std::to_string(ci);
        PipelineView view;

        const InsertionRenderSet set = stage("render", [&] {
            return render_insertion_set(tracer_scene, cam, settings);
        });
        view.r0 = (out / ("r0_" + tag + ".exr")).string();
        view.r1 = (out / ("r1_" + tag + ".exr")).string();
        view.object_layer = (out / ("object_" + tag + ".exr")).string();
        stage("render", [&] {
            write_exr(view.r0, set.r0);
            write_exr(view.r1, set.r1);
            write_exr(view.object_layer, set.object_layer);
        });

        const ShadowRatioMap raw = stage("shadow", [&] {
            return shadow_ratio(set.r0, set.r1, scene.shaping);
        });
        const ShadowRatioMap shaped =
            stage("shadow", [&] { return shape_ratio(raw, scene.shaping); });
        view.shadow_ratio = (out / ("shadow_ratio_" + tag + ".exr")).string();
        view.shadow_shaped = (out / ("shadow_shaped_" + tag + ".exr")).string();
        stage("shadow", [&] {
            write_exr(view.shadow_ratio, raw.ratio);
            write_exr(view.shadow_shaped, shaped.ratio);
        });

        const SrgbImage comp = stage("composite", [&] {
            CompositeInputs in;
            in.r0 = set.r0;
            in.r1 = set.r1;
            in.object_layer = set.object_layer;
            if (!options.background_path.empty()) {
                in.background = read_png(options.background_path);
                if (in.background.width != cam.width ||
                    in.background.height != cam.height)
                    throw invalid_input(
                        "background resolution does not match the camera: " +
                        options.background_path);
            } else {
                in.background = linear_to_srgb(set.r0, scene.shaping.transfer);
            }
            return composite(in, shaped, scene.shaping);
        });
        view.composite = (out / ("composite_" + tag + ".png")).string();
        stage("composite", [&] { write_png(view.composite, comp); });

        json vj = {
            {"r0", view.r0},
            {"r1", view.r1},
            {"object_layer", view.object_layer},
            {"shadow_ratio", view.shadow_ratio},
            {"shadow_shaped", view.shadow_shaped},
            {"composite", view.composite},
        };
        if (!options.reference_images.empty()) {
            const MetricReport report = stage("eval", [&] {
                const SrgbImage ref = read_png(options.reference_images[ci]);
                MetricReport r;
                r.psnr = psnr(comp, ref);
                r.ssim = ssim(comp, ref);
                if (options.vqa_pos && options.vqa_neg)
                    r.vqa_ratio = vqa_ratio(*options.vqa_pos, *options.vqa_neg);
                return r;
            });
            json mj = {{"psnr", report.psnr}, {"ssim", report.ssim}};
            if (report.vqa_ratio) mj["vqa_ratio"] = *report.vqa_ratio;
            vj["metrics"] = mj;
        }
        views.push_back(std::move(vj));
        result.views.push_back(std::move(view));
    }
    manifest["stages"]["views"] = std::move(views);

    result.manifest_path = (out / "manifest.json").string();
    std::ofstream mf(result.manifest_path);
    if (!mf) throw io_error("cannot write manifest: " + result.manifest_path);
    mf << manifest.dump(2) << "\n";
    return result;
}

}  // namespace relight
