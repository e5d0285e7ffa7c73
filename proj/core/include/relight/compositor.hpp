#pragma once

#include "relight/radiometry.hpp"

namespace relight {

struct ShapingParams {
    float gamma_s = 0.8f;   // shadow contrast exponent, (0,1]
    float s_min = 0.05f;    // lower clamp against pure black shadows
    float lambda = 0.9f;    // global shadow strength, [0,1]
    float epsilon = 1e-6f;  // ratio denominator guard
    float validity_bound = 1e-4f;  // minimum linear energy for a reliable ratio
    TransferParams transfer;

    void validate() const;
};

// Per-channel attenuation raster in [0,1]; invalid pixels carry exactly 1.
struct ShadowRatioMap {
    LinearImage ratio;  // 3 channels
};

struct CompositeInputs {
    LinearImage r0;       // receiver render without the object
    LinearImage r1;       // receiver render with the object
    SrgbImage background; // pristine background, no synthetic shadows
    LinearImage object_layer;  // RGBA premultiplied object render
};

// Raw per-channel shadow ratio S_c = clip(R1_c/(R0_c+eps), 0, 1) wherever
// R0_c clears the validity bound; 1 elsewhere.
ShadowRatioMap shadow_ratio(const LinearImage& r0, const LinearImage& r1,
                            const ShapingParams& p);

// Parametric shaping: S~ = max(S^gamma_s, s_min), S^ = 1 - lambda*(1 - S~).
ShadowRatioMap shape_ratio(const ShadowRatioMap& s, const ShapingParams& p);

// Linear-space composite: linearize B, modulate by the shaped ratio, blend
// the premultiplied object layer by its alpha, re-encode to sRGB.
SrgbImage composite(const CompositeInputs& inputs, const ShadowRatioMap& shaped,
                    const ShapingParams& p);

}  // namespace relight
