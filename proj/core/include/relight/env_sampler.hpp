#pragma once

#include <vector>

#include "relight/panorama.hpp"
#include "relight/radiometry.hpp"

namespace relight {

// Importance sampler over the equirect environment, piecewise constant in
// solid angle with pixel probability proportional to luminance times the
// pixel's exact solid angle. Falls back to a uniform sphere distribution
// for an all-black map.
class EnvSampler {
public:
    explicit EnvSampler(const EquirectEnvMap& env,
                        const LuminanceWeights& weights = {});

    // Draws a direction from the luminance-weighted distribution.
    // u1, u2 are uniform [0,1) variates; pdf is solid-angle density.
    Vec3 sample(float u1, float u2, float& pdf) const;

    // Solid-angle density of `sample` at direction d.
    float pdf(const Vec3& d) const;

    bool uniform_fallback() const { return uniform_; }

private:
    int width_ = 0, height_ = 0;
    bool uniform_ = false;
    std::vector<float> row_cdf_;           // height+1 entries
    std::vector<float> cond_cdf_;          // per-row column CDFs, (width+1)*height
    std::vector<float> density_;           // per-pixel solid-angle pdf
    std::vector<float> cos_edges_;         // cos of row boundaries, height+1
};

}  // namespace relight
