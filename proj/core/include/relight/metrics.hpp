#pragma once

#include <optional>

#include "relight/image.hpp"

namespace relight {

struct MetricReport {
    double psnr = 0.0;
    double ssim = 0.0;
    std::optional<double> vqa_ratio;
};

// Peak signal-to-noise ratio over all channels jointly in sRGB domain,
// capped at 99 dB for identical images.
double psnr(const SrgbImage& a, const SrgbImage& b);

// Mean structural similarity on luminance: 11x11 Gaussian window with
// sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1.
double ssim(const SrgbImage& a, const SrgbImage& b);

// pos / (pos + neg); requires pos + neg > 0.
double vqa_ratio(double pos, double neg);

}  // namespace relight
