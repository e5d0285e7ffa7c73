#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relight/scene_desc.hpp"

namespace relight {

enum class BracketMode { Oracle, External };

struct PipelineOptions {
    BracketMode mode = BracketMode::Oracle;
    // External mode: (path, ev) pairs, base exposure included.
    std::vector<std::pair<std::string, float>> external_brackets;
    // Oracle mode: underexposure stops synthesized from the stitched HDR
    // panorama; the EV0 base is always added.
    std::vector<float> oracle_evs{-6.f, -3.f};
    std::string background_path;  // optional photographic background (PNG)
    std::vector<std::string> reference_images;  // optional, one per camera
    std::optional<double> vqa_pos, vqa_neg;
    int cubemap_resolution = 64;
    int panorama_width = 256;
    std::optional<std::uint64_t> seed_override;
    int threads = 1;
};

struct PipelineView {
    std::string r0, r1, object_layer, shadow_ratio, shadow_shaped, composite;
};

struct PipelineResult {
    std::string manifest_path;
    std::string fused_path;
    float dynamic_range_stops = 0.f;
    std::vector<PipelineView> views;
};

// Runs the full insertion pipeline: cubemap render at the insertion point,
// panorama stitch, bracket synthesis/ingestion, HDR fusion, per-camera
// insertion renders, shadow-ratio compositing and optional evaluation.
// Every stage consumes and produces files under out_dir; the manifest
// records all of them. Deterministic for a fixed seed.
PipelineResult run_pipeline(const SceneDescription& scene,
                            const PipelineOptions& options,
                            const std::string& out_dir);

}  // namespace relight
