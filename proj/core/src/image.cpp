#include "relight/image.hpp"

#include <algorithm>
#include <cmath>

namespace relight {

ImageBuffer::ImageBuffer(int w, int h, int c, float fill)
    : width(w), height(h), channels(c) {
    if (w <= 0 || h <= 0 || (c != 1 && c != 3 && c != 4))
        throw invalid_input("image dimensions must be positive with 1, 3 or 4 channels");
    data.assign(static_cast<std::size_t>(w) * h * c, fill);
}

void LinearImage::validate() const {
    for (float v : data) {
        if (!std::isfinite(v) || v < 0.f)
            throw invalid_input("linear image contains NaN/Inf or negative samples");
    }
}

void SrgbImage::clamp_in_place() {
    for (float& v : data) {
        if (std::isnan(v)) v = 0.f;
        v = std::clamp(v, 0.f, 1.f);
    }
}

}  // namespace relight
