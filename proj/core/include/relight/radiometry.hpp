#pragma once

#include "relight/image.hpp"

namespace relight {

// Pure power-law transfer between display-referred and linear space.
// phi(x) = x^gamma linearizes, phi^-1(x) = x^(1/gamma) encodes.
struct TransferParams {
    float gamma = 2.4f;
};

// RGB-to-luminance weighting applied in linear space.
struct LuminanceWeights {
    Vec3 w{0.21267f, 0.71516f, 0.07217f};

    void validate() const;
};

// Single-channel float raster in linear units.
using ScalarRaster = LinearImage;

SrgbImage linear_to_srgb(const LinearImage& img, const TransferParams& p = {});
LinearImage srgb_to_linear(const SrgbImage& img, const TransferParams& p = {});

// Per-pixel dot product of the color channels with w; alpha is dropped.
ScalarRaster luminance(const LinearImage& img, const LuminanceWeights& w = {});

// Re-exposes an HDR image by ev stops and tone-maps it to LDR:
// out = clip(hdr * 2^ev, 0, 1)^(1/gamma). This is the mathematical
// underexposure used to synthesize bracket sequences.
SrgbImage simulate_underexposure(const LinearImage& hdr, float ev,
                                 const TransferParams& p = {});

}  // namespace relight
