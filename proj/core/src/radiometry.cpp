#include "relight/radiometry.hpp"

#include <algorithm>
#include <cmath>

namespace relight {

void LuminanceWeights::validate() const {
    if (w.x < 0.f || w.y < 0.f || w.z < 0.f)
        throw invalid_input("luminance weights must be nonnegative");
    if (std::fabs(w.x + w.y + w.z - 1.f) > 1e-4f)
        throw invalid_input("luminance weights must sum to 1");
}

namespace {

// Number of leading channels that carry color (alpha passes through untouched).
int color_channels(int channels) { return channels == 4 ? 3 : channels; }

}  // namespace

LinearImage srgb_to_linear(const SrgbImage& img, const TransferParams& p) {
    if (p.gamma <= 0.f) throw invalid_input("gamma must be positive");
    LinearImage out(img.width, img.height, img.channels);
    const int cc = color_channels(img.channels);
    const std::size_t n = img.data.size();
    for (std::size_t i = 0; i < n; ++i) {
        const float v = img.data[i];
        out.data[i] = (static_cast<int>(i % img.channels) < cc)
                          ? std::pow(std::clamp(v, 0.f, 1.f), p.gamma)
                          : v;
    }
    return out;
}

SrgbImage linear_to_srgb(const LinearImage& img, const TransferParams& p) {
    if (p.gamma <= 0.f) throw invalid_input("gamma must be positive");
    SrgbImage out(img.width, img.height, img.channels);
    const int cc = color_channels(img.channels);
    const float inv_gamma = 1.f / p.gamma;
    const std::size_t n = img.data.size();
    for (std::size_t i = 0; i < n; ++i) {
        const float v = img.data[i];
        out.data[i] = (static_cast<int>(i % img.channels) < cc)
                          ? std::pow(std::clamp(v, 0.f, 1.f), inv_gamma)
                          : std::clamp(v, 0.f, 1.f);
    }
    return out;
}

ScalarRaster luminance(const LinearImage& img, const LuminanceWeights& lw) {
    if (img.channels < 3)
        throw invalid_input("luminance requires at least 3 channels");
    lw.validate();
    ScalarRaster out(img.width, img.height, 1);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(x, y, 0) = dot(img.rgb(x, y), lw.w);
    return out;
}

SrgbImage simulate_underexposure(const LinearImage& hdr, float ev,
                                 const TransferParams& p) {
    if (!std::isfinite(ev)) throw invalid_input("exposure value must be finite");
    if (p.gamma <= 0.f) throw invalid_input("gamma must be positive");
    SrgbImage out(hdr.width, hdr.height, hdr.channels);
    const int cc = color_channels(hdr.channels);
    const float scale = std::exp2(ev);
    const float inv_gamma = 1.f / p.gamma;
    const std::size_t n = hdr.data.size();
    for (std::size_t i = 0; i < n; ++i) {
        const float v = hdr.data[i];
        if (static_cast<int>(i % hdr.channels) < cc)
            out.data[i] = std::pow(std::clamp(v * scale, 0.f, 1.f), inv_gamma);
        else
            out.data[i] = std::clamp(v, 0.f, 1.f);
    }
    return out;
}

}  // namespace relight
