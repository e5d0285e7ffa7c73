#include "relight/compositor.hpp"

#include <algorithm>
#include <cmath>

namespace relight {

void ShapingParams::validate() const {
    if (!(gamma_s > 0.f && gamma_s <= 1.f))
        throw invalid_input("shadow gamma must lie in (0,1]");
    if (!(s_min >= 0.f && s_min < 1.f))
        throw invalid_input("shadow floor must lie in [0,1)");
    if (!(lambda >= 0.f && lambda <= 1.f))
        throw invalid_input("shadow strength must lie in [0,1]");
    if (!(epsilon > 0.f) || !(validity_bound >= 0.f))
        throw invalid_input("epsilon/validity bound out of range");
}

ShadowRatioMap shadow_ratio(const LinearImage& r0, const LinearImage& r1,
                            const ShapingParams& p) {
    p.validate();
    if (r0.width != r1.width || r0.height != r1.height)
        throw invalid_input("shadow ratio inputs must match in resolution");
    ShadowRatioMap out;
    out.ratio = LinearImage(r0.width, r0.height, 3, 1.f);
    for (int y = 0; y < r0.height; ++y) {
        for (int x = 0; x < r0.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                const float e0 = r0.at(x, y, c);
                if (e0 < p.validity_bound) continue;  // keeps the 1 fill
                const float e1 = r1.at(x, y, c);
                out.ratio.at(x, y, c) =
                    std::clamp(e1 / (e0 + p.epsilon), 0.f, 1.f);
            }
        }
    }
    return out;
}

ShadowRatioMap shape_ratio(const ShadowRatioMap& s, const ShapingParams& p) {
    p.validate();
    ShadowRatioMap out;
    out.ratio = s.ratio;
    for (float& v : out.ratio.data) {
        const float contrast =
            p.gamma_s == 1.f ? v : std::pow(std::clamp(v, 0.f, 1.f), p.gamma_s);
        const float floored = std::max(contrast, p.s_min);
        // algebraically 1 - lambda*(1 - x); this form is exact at lambda = 1
        v = (1.f - p.lambda) + p.lambda * floored;
    }
    return out;
}

SrgbImage composite(const CompositeInputs& inputs, const ShadowRatioMap& shaped,
                    const ShapingParams& p) {
    p.validate();
    const SrgbImage& bg = inputs.background;
    const LinearImage& obj = inputs.object_layer;
    if (bg.width != shaped.ratio.width || bg.height != shaped.ratio.height ||
        obj.width != bg.width || obj.height != bg.height)
        throw invalid_input("composite inputs must match in resolution");
    if (obj.channels != 4)
        throw invalid_input("object layer must carry an alpha channel");

    const LinearImage bg_lin = srgb_to_linear(bg, p.transfer);
    LinearImage out_lin(bg.width, bg.height, 3);
    for (int y = 0; y < bg.height; ++y) {
        for (int x = 0; x < bg.width; ++x) {
            const float m = std::clamp(obj.at(x, y, 3), 0.f, 1.f);
            // object layer is premultiplied, so Eq's O*M term is its color
            const Vec3 shadowed = bg_lin.rgb(x, y) * shaped.ratio.rgb(x, y);
            const Vec3 c = shadowed * (1.f - m) + obj.rgb(x, y);
            out_lin.set_rgb(x, y, max(c, Vec3{0, 0, 0}));
        }
    }
    return linear_to_srgb(out_lin, p.transfer);
}

}  // namespace relight
