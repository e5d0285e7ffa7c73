// Command-line front end. Every subcommand reads and writes files only, so
// any pipeline prefix can be replayed by hand.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "relight/compositor.hpp"
#include "relight/fusion.hpp"
#include "relight/image_io.hpp"
#include "relight/metrics.hpp"
#include "relight/pipeline.hpp"
#include "relight/radiometry.hpp"
#include "relight/scene_desc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace relight;

namespace {

struct GlobalOpts {
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string out_dir = ".";
};

std::pair<std::string, float> parse_bracket_spec(const std::string& spec) {
    const auto pos = spec.rfind(':');
    if (pos == std::string::npos || pos == 0 || pos + 1 == spec.size())
        throw invalid_input("bracket must be path:ev, got \"" + spec + "\"");
    try {
        return {spec.substr(0, pos), std::stof(spec.substr(pos + 1))};
    } catch (const std::exception&) {
        throw invalid_input("bad exposure value in bracket \"" + spec + "\"");
    }
}

// Domain-agnostic read/write keyed on the file extension; PNG carries
// display-referred samples, EXR/PFM linear ones.
ImageBuffer read_any(const std::string& path) {
    if (is_linear_extension(path)) return read_linear_image(path);
    return read_png(path);
}

void write_any(const std::string& path, const ImageBuffer& img) {
    if (is_linear_extension(path)) {
        LinearImage lin;
        static_cast<ImageBuffer&>(lin) = img;
        for (float& v : lin.data)
            if (v < 0.f) v = 0.f;
        write_linear_image(path, lin);
    } else {
        SrgbImage out;
        static_cast<ImageBuffer&>(out) = img;
        out.clamp_in_place();
        write_png(path, out);
    }
}

fs::path out_path(const GlobalOpts& g, const std::string& name) {
    fs::path p(name);
    if (p.is_absolute()) return p;
    fs::create_directories(g.out_dir);
    return fs::path(g.out_dir) / p;
}

int run_stitch(const GlobalOpts& g, const std::array<std::string, 6>& faces,
               int width, const std::string& out) {
    CubemapFaceSet set;
    for (int f = 0; f < 6; ++f)
        set.faces[f] = read_any(faces[f]);
    const ImageBuffer pano = stitch_cubemap(set, width);
    write_any(out_path(g, out).string(), pano);
    return 0;
}

int run_fuse(const GlobalOpts& g, const std::vector<std::string>& specs,
             const std::string& out, FusionParams params) {
    BracketSequence seq;
    for (const std::string& s : specs) {
        auto [path, ev] = parse_bracket_spec(s);
        BracketEntry e;
        e.ev = ev;
        e.image = read_png(path);
        seq.entries.push_back(std::move(e));
    }
    std::sort(seq.entries.begin(), seq.entries.end(),
              [](const BracketEntry& a, const BracketEntry& b) {
                  return a.ev < b.ev;
              });
    const FusedHdr fused = fuse_brackets(seq, params);
    write_linear_image(out_path(g, out).string(), fused.map.image);
    std::cout << "dynamic_range_stops " << fused.dynamic_range_stops << "\n";
    return 0;
}

int run_oracle_brackets(const GlobalOpts& g, const std::string& hdr_path,
                        std::vector<float> evs, float gamma) {
    const LinearImage hdr = read_linear_image(hdr_path);
    std::sort(evs.begin(), evs.end());
    evs.erase(std::unique(evs.begin(), evs.end()), evs.end());
    TransferParams transfer{gamma};
    for (float ev : evs) {
        char tag[32];
        std::snprintf(tag, sizeof(tag), "%+g", static_cast<double>(ev));
        const fs::path p = out_path(g, std::string("bracket_ev") + tag + ".png");
        write_png(p.string(), simulate_underexposure(hdr, ev, transfer));
        std::cout << p.string() << "\n";
    }
    return 0;
}

int run_render(const GlobalOpts& g, const std::string& scene_path,
               std::optional<int> spp, std::optional<int> max_depth) {
    const SceneDescription scene = parse_scene(scene_path);
    const TracerScene tracer_scene = build_tracer_scene(scene);
    RenderSettings settings = scene.render;
    settings.env = load_environment(scene);
    settings.threads = g.threads;
    if (g.seed) settings.seed = *g.seed;
    if (spp) settings.samples_per_pixel = *spp;
    if (max_depth) settings.max_depth = *max_depth;
    for (std::size_t ci = 0; ci < scene.cameras.size(); ++ci) {
        const InsertionRenderSet set =
            render_insertion_set(tracer_scene, scene.cameras[ci], settings);
        const std::string tag = "cam" + std::to_string(ci);
        write_exr(out_path(g, "r0_" + tag + ".exr").string(), set.r0);
        write_exr(out_path(g, "r1_" + tag + ".exr").string(), set.r1);
        write_exr(out_path(g, "object_" + tag + ".exr").string(),
                  set.object_layer);
    }
    return 0;
}

int run_composite(const GlobalOpts& g, const std::string& r0,
                  const std::string& r1, const std::string& object,
                  const std::string& background, const std::string& out,
                  ShapingParams params) {
    params.validate();
    CompositeInputs in;
    in.r0 = read_linear_image(r0);
    in.r1 = read_linear_image(r1);
    in.object_layer = read_linear_image(object);
    if (!background.empty())
        in.background = read_png(background);
    else
        in.background = linear_to_srgb(in.r0, params.transfer);
    const ShadowRatioMap shaped =
        shape_ratio(shadow_ratio(in.r0, in.r1, params), params);
    write_png(out_path(g, out).string(), composite(in, shaped, params));
    return 0;
}

std::vector<std::pair<std::string, std::string>> pair_images(
    const std::string& pred, const std::string& ref) {
    std::vector<std::pair<std::string, std::string>> pairs;
    if (fs::is_directory(pred) != fs::is_directory(ref))
        throw invalid_input("--pred and --ref must both be files or both dirs");
    if (!fs::is_directory(pred)) {
        pairs.emplace_back(pred, ref);
        return pairs;
    }
    std::map<std::string, fs::path> names;  // sorted for stable report order
    for (const auto& e : fs::directory_iterator(pred))
        if (e.is_regular_file()) names[e.path().filename().string()] = e.path();
    for (const auto& [name, p] : names) {
        const fs::path r = fs::path(ref) / name;
        if (!fs::exists(r))
            throw invalid_input("no reference counterpart for " + p.string());
        pairs.emplace_back(p.string(), r.string());
    }
    if (pairs.empty()) throw invalid_input("no images found in " + pred);
    return pairs;
}

int run_eval(const GlobalOpts& g, const std::string& pred,
             const std::string& ref, std::optional<double> pos,
             std::optional<double> neg) {
    json report;
    report["pairs"] = json::array();
    double psnr_sum = 0, ssim_sum = 0;
    const auto pairs = pair_images(pred, ref);
    for (const auto& [p, r] : pairs) {
        const SrgbImage a = read_png(p);
        const SrgbImage b = read_png(r);
        const double ps = psnr(a, b), ss = ssim(a, b);
        psnr_sum += ps;
        ssim_sum += ss;
        report["pairs"].push_back(
            {{"pred", p}, {"ref", r}, {"psnr", ps}, {"ssim", ss}});
    }
    report["mean_psnr"] = psnr_sum / static_cast<double>(pairs.size());
    report["mean_ssim"] = ssim_sum / static_cast<double>(pairs.size());
    if (pos && neg) report["vqa_ratio"] = vqa_ratio(*pos, *neg);
    std::cout << report.dump(2) << "\n";
    return 0;
}

int run_pipeline_cmd(const GlobalOpts& g, const std::string& scene_path,
                     const std::string& mode,
                     const std::vector<std::string>& bracket_specs,
                     const std::string& background,
                     const std::vector<std::string>& refs,
                     std::optional<double> pos, std::optional<double> neg,
                     int cubemap_res, int pano_width) {
    const SceneDescription scene = parse_scene(scene_path);
    PipelineOptions opts;
    if (mode == "oracle") {
        opts.mode = BracketMode::Oracle;
    } else if (mode == "external") {
        opts.mode = BracketMode::External;
        for (const std::string& s : bracket_specs)
            opts.external_brackets.push_back(parse_bracket_spec(s));
    } else {
        throw invalid_input("--mode must be oracle or external");
    }
    opts.background_path = background;
    opts.reference_images = refs;
    opts.vqa_pos = pos;
    opts.vqa_neg = neg;
    opts.cubemap_resolution = cubemap_res;
    opts.panorama_width = pano_width;
    opts.seed_override = g.seed;
    opts.threads = g.threads;
    const PipelineResult result = run_pipeline(scene, opts, g.out_dir);
    std::cout << result.manifest_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HDR environment reconstruction and object insertion"};
    app.require_subcommand(1);

    GlobalOpts g;
    std::uint64_t seed_value = 0;
    auto* seed_opt =
        app.add_option("--seed", seed_value, "RNG seed override")->group("Global");
    app.add_option("--threads", g.threads, "worker threads")
        ->check(CLI::PositiveNumber)
        ->group("Global");
    app.add_option("--out-dir", g.out_dir, "output directory")->group("Global");

    // stitch
    auto* stitch = app.add_subcommand("stitch", "cubemap faces -> equirect");
    std::array<std::string, 6> face_paths;
    static const char* kFaceFlags[6] = {"--posx", "--negx", "--posy",
                                        "--negy", "--posz", "--negz"};
    for (int f = 0; f < 6; ++f)
        stitch->add_option(kFaceFlags[f], face_paths[f])->required();
    int stitch_width = 512;
    std::string stitch_out = "panorama.exr";
    stitch->add_option("--width", stitch_width, "panorama width (height = width/2)");
    stitch->add_option("--out", stitch_out, "output image (png/exr/pfm)");

    // fuse
    auto* fuse = app.add_subcommand("fuse", "LDR brackets -> HDR panorama");
    std::vector<std::string> fuse_brackets_arg;
    std::string fuse_out = "fused.exr";
    FusionParams fuse_params;
    fuse->add_option("--bracket", fuse_brackets_arg, "path:ev, repeatable")
        ->required();
    fuse->add_option("--out", fuse_out, "output HDR (exr/pfm)");
    fuse->add_option("--threshold", fuse_params.saturation_threshold);
    fuse->add_option("--halfwidth", fuse_params.blend_halfwidth);
    fuse->add_option("--gamma", fuse_params.transfer.gamma);

    // oracle-brackets
    auto* oracle = app.add_subcommand("oracle-brackets",
                                      "synthesize LDR brackets from an HDR map");
    std::string oracle_hdr;
    std::vector<float> oracle_evs{0.f, -3.f, -6.f};
    float oracle_gamma = TransferParams{}.gamma;
    oracle->add_option("--hdr", oracle_hdr)->required();
    oracle->add_option("--ev", oracle_evs, "exposure values, repeatable");
    oracle->add_option("--gamma", oracle_gamma);

    // render
    auto* render = app.add_subcommand("render", "insertion renders per camera");
    std::string render_scene;
    std::optional<int> render_spp, render_depth;
    render->add_option("--scene", render_scene)->required();
    render->add_option("--spp", render_spp, "samples per pixel override");
    render->add_option("--max-depth", render_depth);

    // composite
    auto* comp = app.add_subcommand("composite", "shadow-ratio composite");
    std::string comp_r0, comp_r1, comp_obj, comp_bg, comp_out = "composite.png";
    ShapingParams comp_params;
    comp->add_option("--r0", comp_r0)->required();
    comp->add_option("--r1", comp_r1)->required();
    comp->add_option("--object", comp_obj)->required();
    comp->add_option("--background", comp_bg, "pristine background PNG");
    comp->add_option("--out", comp_out);
    comp->add_option("--shadow-gamma", comp_params.gamma_s);
    comp->add_option("--shadow-min", comp_params.s_min);
    comp->add_option("--shadow-strength", comp_params.lambda);

    // eval
    auto* eval = app.add_subcommand("eval", "PSNR/SSIM/VQA report");
    std::string eval_pred, eval_ref;
    std::optional<double> eval_pos, eval_neg;
    eval->add_option("--pred", eval_pred)->required();
    eval->add_option("--ref", eval_ref)->required();
    eval->add_option("--pos-score", eval_pos);
    eval->add_option("--neg-score", eval_neg);

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "end-to-end insertion run");
    std::string pipe_scene, pipe_mode = "oracle", pipe_bg;
    std::vector<std::string> pipe_brackets, pipe_refs;
    std::optional<double> pipe_pos, pipe_neg;
    int pipe_cubemap = 64, pipe_width = 256;
    pipe->add_option("--scene", pipe_scene)->required();
    pipe->add_option("--mode", pipe_mode, "oracle | external");
    pipe->add_option("--bracket", pipe_brackets, "path:ev (external mode)");
    pipe->add_option("--background", pipe_bg);
    pipe->add_option("--ref", pipe_refs, "reference image per camera");
    pipe->add_option("--pos-score", pipe_pos);
    pipe->add_option("--neg-score", pipe_neg);
    pipe->add_option("--cubemap-res", pipe_cubemap);
    pipe->add_option("--pano-width", pipe_width);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Collapse CLI11's fine-grained usage codes into a single class so
        // exit statuses stay disjoint from the pipeline error codes (2-5).
        return app.exit(e) == 0 ? 0 : 1;
    }
    if (seed_opt->count()) g.seed = seed_value;

    try {
        if (*stitch) return run_stitch(g, face_paths, stitch_width, stitch_out);
        if (*fuse) return run_fuse(g, fuse_brackets_arg, fuse_out, fuse_params);
        if (*oracle)
            return run_oracle_brackets(g, oracle_hdr, oracle_evs, oracle_gamma);
        if (*render) return run_render(g, render_scene, render_spp, render_depth);
        if (*comp)
            return run_composite(g, comp_r0, comp_r1, comp_obj, comp_bg,
                                 comp_out, comp_params);
        if (*eval) return run_eval(g, eval_pred, eval_ref, eval_pos, eval_neg);
        if (*pipe)
            return run_pipeline_cmd(g, pipe_scene, pipe_mode, pipe_brackets,
                                    pipe_bg, pipe_refs, pipe_pos, pipe_neg,
                                    pipe_cubemap, pipe_width);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
