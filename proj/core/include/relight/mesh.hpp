#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relight/vecmath.hpp"

namespace relight {

enum class MeshRole { Receiver, Object };

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Vec3> vertex_colors;       // empty or one per vertex
    std::vector<std::uint32_t> indices;    // triangle list
    MeshRole role = MeshRole::Receiver;

    std::size_t triangle_count() const { return indices.size() / 3; }
    bool has_vertex_colors() const { return !vertex_colors.empty(); }

    // Checks index bounds, degenerate triangles and (for receivers) the
    // presence of vertex colors.
    void validate() const;

    void apply_transform(const Mat4& m);
};

// Wavefront OBJ triangle loader. Accepts the common extension of three
// extra floats on `v` lines as per-vertex colors; polygons are fan
// triangulated. Normals/texcoords are parsed past and ignored.
TriangleMesh load_obj(const std::string& path, MeshRole role);
void save_obj(const std::string& path, const TriangleMesh& mesh);

// Procedural builders used by tests and demo scenes.
TriangleMesh make_quad(const Vec3& origin, const Vec3& edge_u, const Vec3& edge_v,
                       const Vec3& color, MeshRole role);
TriangleMesh make_box(const Vec3& min_corner, const Vec3& max_corner,
                      const Vec3& color, MeshRole role, bool inward_normals);
TriangleMesh make_uv_sphere(const Vec3& center, float radius, int segments,
                            int rings, const Vec3& color, MeshRole role);

}  // namespace relight
