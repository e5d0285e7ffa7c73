#pragma once

#include <vector>

#include "relight/panorama.hpp"
#include "relight/radiometry.hpp"

namespace relight {

// One LDR panorama together with its exposure value in stops.
struct BracketEntry {
    SrgbImage image;
    float ev = 0.f;
};

// Ordered LDR exposures, ascending ev; the last entry is the base (EV0)
// exposure whose chromaticity the fused result keeps.
struct BracketSequence {
    std::vector<BracketEntry> entries;

    void validate() const;
    const BracketEntry& base() const { return entries.back(); }
};

struct FusionParams {
    float saturation_threshold = 0.9f;
    float blend_halfwidth = 0.05f;
    float epsilon = 1e-6f;
    TransferParams transfer;
    LuminanceWeights weights;

    void validate() const;
};

struct FusedHdr {
    EquirectEnvMap map;
    // max over pixels of log2(luminance / base-exposure clip level)
    float dynamic_range_stops = 0.f;
};

// Eq-by-eq building blocks of the merge. Exposed so each stage can be
// tested against its own oracle.
ScalarRaster normalized_luminance(const BracketEntry& entry, const FusionParams& p);
ScalarRaster scale_to_irradiance(const ScalarRaster& lum, float ev);
ScalarRaster iterative_merge(const BracketSequence& seq, const FusionParams& p);
FusedHdr reattach_chromaticity(const ScalarRaster& merged, const BracketEntry& base,
                               const FusionParams& p);

// Full luminance-gated exposure fusion: linearize, scale to a common
// radiometric space, merge darkest-to-brightest with a smoothstep blend
// around the saturation threshold, then transfer the merged luminance
// onto the base image's chromaticity.
FusedHdr fuse_brackets(const BracketSequence& seq, const FusionParams& p = {});

}  // namespace relight
