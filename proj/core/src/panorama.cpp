#include "relight/panorama.hpp"

#include <algorithm>
#include <cmath>

namespace relight {

namespace {
constexpr float kPi = 3.14159265358979323846f;
constexpr float kTwoPi = 2.f * kPi;
}  // namespace

Vec3 dir_from_equirect(float u, float v) {
    const float theta = kTwoPi * (u - 0.5f);
    const float phi = kPi * v;
    const float sp = std::sin(phi);
    return {sp * std::sin(theta), std::cos(phi), -sp * std::cos(theta)};
}

void equirect_from_dir(const Vec3& d, float& u, float& v) {
    const float len = length(d);
    if (len < 1e-12f) throw invalid_input("cannot map zero direction to equirect");
    const Vec3 n = d / len;
    v = std::acos(std::clamp(n.y, -1.f, 1.f)) / kPi;
    const float theta = std::atan2(n.x, -n.z);
    u = theta / kTwoPi + 0.5f;
    u -= std::floor(u);
    if (u >= 1.f) u = 0.f;
}

FaceBasis face_basis(CubeFace face) {
    switch (face) {
        case CubeFace::PosX: return {{1, 0, 0}, {0, 0, 1}, {0, 1, 0}};
        case CubeFace::NegX: return {{-1, 0, 0}, {0, 0, -1}, {0, 1, 0}};
        case CubeFace::PosY: return {{0, 1, 0}, {1, 0, 0}, {0, 0, 1}};
        case CubeFace::NegY: return {{0, -1, 0}, {1, 0, 0}, {0, 0, -1}};
        case CubeFace::PosZ: return {{0, 0, 1}, {-1, 0, 0}, {0, 1, 0}};
        case CubeFace::NegZ: return {{0, 0, -1}, {1, 0, 0}, {0, 1, 0}};
    }
    throw invalid_input("invalid cube face");
}

const char* face_name(CubeFace face) {
    switch (face) {
        case CubeFace::PosX: return "posx";
        case CubeFace::NegX: return "negx";
        case CubeFace::PosY: return "posy";
        case CubeFace::NegY: return "negy";
        case CubeFace::PosZ: return "posz";
        case CubeFace::NegZ: return "negz";
    }
    return "?";
}

void CubemapFaceSet::validate() const {
    const int n = faces[0].width;
    for (const auto& f : faces) {
        if (f.empty()) throw invalid_input("cubemap face missing");
        if (f.width != f.height) throw invalid_input("cubemap faces must be square");
        if (f.width != n || f.channels != faces[0].channels)
            throw invalid_input("cubemap faces must all have equal size and channels");
    }
}

EquirectEnvMap::EquirectEnvMap(LinearImage img) : image(std::move(img)) {
    if (image.width != 2 * image.height)
        throw invalid_input("equirect map must have 2:1 aspect ratio");
}

namespace {

// Bilinear fetch with clamped borders (used inside a single cube face).
Vec3 sample_face(const ImageBuffer& img, float fx, float fy) {
    const int w = img.width, h = img.height;
    fx = std::clamp(fx, 0.f, static_cast<float>(w - 1));
    fy = std::clamp(fy, 0.f, static_cast<float>(h - 1));
    const int x0 = static_cast<int>(fx);
    const int y0 = static_cast<int>(fy);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const float tx = fx - x0, ty = fy - y0;
    const Vec3 a = img.rgb(x0, y0) * (1 - tx) + img.rgb(x1, y0) * tx;
    const Vec3 b = img.rgb(x0, y1) * (1 - tx) + img.rgb(x1, y1) * tx;
    return a * (1 - ty) + b * ty;
}

CubeFace dominant_face(const Vec3& d) {
    const float ax = std::fabs(d.x), ay = std::fabs(d.y), az = std::fabs(d.z);
    if (ax >= ay && ax >= az) return d.x > 0 ? CubeFace::PosX : CubeFace::NegX;
    if (ay >= az) return d.y > 0 ? CubeFace::PosY : CubeFace::NegY;
    return d.z > 0 ? CubeFace::PosZ : CubeFace::NegZ;
}

}  // namespace

ImageBuffer stitch_cubemap(const CubemapFaceSet& faces, int out_width) {
    faces.validate();
    if (out_width <= 0 || out_width % 2 != 0)
        throw invalid_input("panorama width must be positive and even");
    const int w = out_width, h = out_width / 2;
    ImageBuffer out(w, h, 3);
    for (int y = 0; y < h; ++y) {
        const float v = (y + 0.5f) / h;
        for (int x = 0; x < w; ++x) {
            const float u = (x + 0.5f) / w;
            const Vec3 d = dir_from_equirect(u, v);
            const CubeFace face = dominant_face(d);
            const FaceBasis basis = face_basis(face);
            const ImageBuffer& img = faces[face];
            const float t = dot(d, basis.forward);
            const float a = dot(d, basis.right) / t;
            const float b = dot(d, basis.up) / t;
            const int n = img.width;
            const float fx = (a + 1.f) * 0.5f * n - 0.5f;
            const float fy = (1.f - b) * 0.5f * n - 0.5f;
            out.set_rgb(x, y, sample_face(img, fx, fy));
        }
    }
    return out;
}

CubemapFaceSet faces_from_equirect(const ImageBuffer& pano, int face_resolution) {
    if (face_resolution <= 0) throw invalid_input("face resolution must be positive");
    CubemapFaceSet out;
    for (int fi = 0; fi < 6; ++fi) {
        const FaceBasis basis = face_basis(static_cast<CubeFace>(fi));
        ImageBuffer& img = out.faces[fi];
        img = ImageBuffer(face_resolution, face_resolution, 3);
        for (int j = 0; j < face_resolution; ++j) {
            const float b = 1.f - 2.f * (j + 0.5f) / face_resolution;
            for (int i = 0; i < face_resolution; ++i) {
                const float a = 2.f * (i + 0.5f) / face_resolution - 1.f;
                const Vec3 d =
                    normalize(basis.forward + basis.right * a + basis.up * b);
                img.set_rgb(i, j, sample_equirect(pano, d));
            }
        }
    }
    return out;
}

Vec3 sample_equirect(const ImageBuffer& pano, const Vec3& d) {
    float u, v;
    equirect_from_dir(d, u, v);
    const int w = pano.width, h = pano.height;
    float fx = u * w - 0.5f;
    float fy = std::clamp(v * h - 0.5f, 0.f, static_cast<float>(h - 1));
    if (fx < 0.f) fx += w;  // horizontal wrap
    const int x0 = static_cast<int>(fx) % w;
    const int x1 = (x0 + 1) % w;
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, h - 1);
    const float tx = fx - std::floor(fx);
    const float ty = fy - y0;
    const Vec3 a = pano.rgb(x0, y0) * (1 - tx) + pano.rgb(x1, y0) * tx;
    const Vec3 b = pano.rgb(x0, y1) * (1 - tx) + pano.rgb(x1, y1) * tx;
    return a * (1 - ty) + b * ty;
}

}  // namespace relight
