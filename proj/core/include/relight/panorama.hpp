#pragma once

#include <array>

#include "relight/image.hpp"

namespace relight {

// Direction convention (fixed across the whole project):
//   u in [0,1) -> azimuth theta = 2*pi*(u - 0.5)
//   v in [0,1] -> polar   phi   = pi*v
//   d = (sin(phi)*sin(theta), cos(phi), -sin(phi)*cos(theta))
// Right-handed, Y-up, -Z forward. (u,v)=(0.5,0.5) maps to (0,0,-1),
// v=0 maps to the +Y pole.
Vec3 dir_from_equirect(float u, float v);

// Inverse mapping; u wrapped into [0,1). Throws on a zero-length vector.
void equirect_from_dir(const Vec3& d, float& u, float& v);

enum class CubeFace : int { PosX = 0, NegX, PosY, NegY, PosZ, NegZ };

struct FaceBasis {
    Vec3 forward, right, up;
};

// Per-face camera basis for the 90-degree-FOV cube faces. Image row 0 is
// toward `up`, column 0 toward -`right`.
FaceBasis face_basis(CubeFace face);

const char* face_name(CubeFace face);

// Six square same-size images keyed by face.
struct CubemapFaceSet {
    std::array<ImageBuffer, 6> faces;

    const ImageBuffer& operator[](CubeFace f) const {
        return faces[static_cast<int>(f)];
    }
    ImageBuffer& operator[](CubeFace f) {
        return faces[static_cast<int>(f)];
    }
    int resolution() const { return faces[0].width; }
    void validate() const;
};

// 2:1 equirectangular radiance map.
struct EquirectEnvMap {
    LinearImage image;

    EquirectEnvMap() = default;
    explicit EquirectEnvMap(LinearImage img);
};

// Projects every equirect pixel center onto the face with the dominant
// direction component and bilinearly samples it. Height = out_width/2.
ImageBuffer stitch_cubemap(const CubemapFaceSet& faces, int out_width);

// Renders the six cube faces back out of an equirect map by sampling the
// panorama along each face pixel's direction.
CubemapFaceSet faces_from_equirect(const ImageBuffer& pano, int face_resolution);

// Bilinear lookup with horizontal wrap and vertical clamp.
Vec3 sample_equirect(const ImageBuffer& pano, const Vec3& d);

inline Vec3 sample_env(const EquirectEnvMap& map, const Vec3& d) {
    return sample_equirect(map.image, d);
}

}  // namespace relight
