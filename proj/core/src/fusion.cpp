#include "relight/fusion.hpp"

#include <algorithm>
#include <cmath>

namespace relight {

void BracketSequence::validate() const {
    if (entries.empty()) throw invalid_input("bracket sequence must have >= 1 entry");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].image.empty())
            throw invalid_input("bracket entry has empty image");
        if (!entries[i].image.same_shape(entries[0].image))
            throw invalid_input("bracket images must all have the same dimensions");
        if (i > 0 && !(entries[i].ev > entries[i - 1].ev))
            throw invalid_input("bracket exposure values must be strictly increasing");
    }
}

void FusionParams::validate() const {
    if (!(saturation_threshold > 0.f && saturation_threshold < 1.f))
        throw invalid_input("saturation threshold must lie in (0,1)");
    const float limit = std::min(saturation_threshold, 1.f - saturation_threshold);
    if (!(blend_halfwidth >= 0.f && blend_halfwidth < limit))
        throw invalid_input("blend halfwidth out of range");
    weights.validate();
}

ScalarRaster normalized_luminance(const BracketEntry& entry, const FusionParams& p) {
    return luminance(srgb_to_linear(entry.image, p.transfer), p.weights);
}

ScalarRaster scale_to_irradiance(const ScalarRaster& lum, float ev) {
    ScalarRaster out = lum;
    const float scale = std::exp2(-ev);
    for (float& v : out.data) v *= scale;
    return out;
}

namespace {

float smoothstep01(float t) {
    t = std::clamp(t, 0.f, 1.f);
    return t * t * (3.f - 2.f * t);
}

}  // namespace

ScalarRaster iterative_merge(const BracketSequence& seq, const FusionParams& p) {
    seq.validate();
    p.validate();

    ScalarRaster merged;  // E'_i
    const float lo = p.saturation_threshold - p.blend_halfwidth;
    const float span = 2.f * p.blend_halfwidth;
    for (std::size_t i = 0; i < seq.entries.size(); ++i) {
        ScalarRaster lum = normalized_luminance(seq.entries[i], p);
        ScalarRaster irr = scale_to_irradiance(lum, seq.entries[i].ev);
        if (i == 0) {
            merged = std::move(irr);  // darkest bracket is the unconditional floor
            continue;
        }
        // Blend weight toward the darker accumulated estimate: 0 below the
        // threshold band (current exposure is trusted), 1 above it (saturated,
        // keep the darker bracket's radiometry).
        for (std::size_t k = 0; k < merged.data.size(); ++k) {
            const float w = span > 0.f
                                ? smoothstep01((lum.data[k] - lo) / span)
                                : (lum.data[k] > p.saturation_threshold ? 1.f : 0.f);
            merged.data[k] = w * merged.data[k] + (1.f - w) * irr.data[k];
        }
    }
    return merged;
}

FusedHdr reattach_chromaticity(const ScalarRaster& merged, const BracketEntry& base,
                               const FusionParams& p) {
    LinearImage base_lin = srgb_to_linear(base.image, p.transfer);
    ScalarRaster base_lum = luminance(base_lin, p.weights);

    LinearImage hdr(base_lin.width, base_lin.height, 3);
    float peak = 0.f;
    for (int y = 0; y < hdr.height; ++y) {
        for (int x = 0; x < hdr.width; ++x) {
            const float ln = base_lum.at(x, y, 0);
            const float e = merged.at(x, y, 0);
            if (ln <= p.epsilon) {
                hdr.set_rgb(x, y, {0, 0, 0});
                continue;
            }
            hdr.set_rgb(x, y, base_lin.rgb(x, y) * (e / ln));
            peak = std::max(peak, e);
        }
    }
    FusedHdr out;
    out.map = EquirectEnvMap(std::move(hdr));
    out.dynamic_range_stops = peak > 0.f ? std::max(0.f, std::log2(peak)) : 0.f;
    return out;
}

FusedHdr fuse_brackets(const BracketSequence& seq, const FusionParams& p) {
    ScalarRaster merged = iterative_merge(seq, p);
    return reattach_chromaticity(merged, seq.base(), p);
}

}  // namespace relight
