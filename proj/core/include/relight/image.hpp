#pragma once

#include <cstddef>
#include <vector>

#include "relight/error.hpp"
#include "relight/vecmath.hpp"

namespace relight {

// Row-major float raster, 3 or 4 channels. Shared layout for both the
// linear (radiometric) and sRGB (display-referred) image types below.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    int channels = 3;
    std::vector<float> data;

    ImageBuffer() = default;
    ImageBuffer(int w, int h, int c, float fill = 0.f);

    bool empty() const { return data.empty(); }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * height;
    }
    std::size_t index(int x, int y, int c) const {
        return (static_cast<std::size_t>(y) * width + x) * channels + c;
    }
    float& at(int x, int y, int c) { return data[index(x, y, c)]; }
    float at(int x, int y, int c) const { return data[index(x, y, c)]; }

    Vec3 rgb(int x, int y) const {
        const std::size_t i = index(x, y, 0);
        return {data[i], data[i + 1], data[i + 2]};
    }
    void set_rgb(int x, int y, const Vec3& v) {
        const std::size_t i = index(x, y, 0);
        data[i] = v.x;
        data[i + 1] = v.y;
        data[i + 2] = v.z;
    }

    bool same_shape(const ImageBuffer& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// Linear radiometric image; samples >= 0, may exceed 1 (HDR).
struct LinearImage : ImageBuffer {
    LinearImage() = default;
    LinearImage(int w, int h, int c = 3, float fill = 0.f)
        : ImageBuffer(w, h, c, fill) {}

    // Checks for NaN/Inf and negatives; throws on violation.
    void validate() const;
};

// Display-referred image; samples in [0,1].
struct SrgbImage : ImageBuffer {
    SrgbImage() = default;
    SrgbImage(int w, int h, int c = 3, float fill = 0.f)
        : ImageBuffer(w, h, c, fill) {}

    // Clamps every sample into [0,1]; NaN becomes 0.
    void clamp_in_place();
};

}  // namespace relight
