#include "relight/mesh.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "relight/error.hpp"

namespace relight {

void TriangleMesh::validate() const {
    if (indices.size() % 3 != 0)
        throw invalid_input("triangle index count must be a multiple of 3");
    if (!vertex_colors.empty() && vertex_colors.size() != vertices.size())
        throw invalid_input("vertex color count must match vertex count");
    if (role == MeshRole::Receiver && vertex_colors.empty())
        throw invalid_input("receiver meshes require vertex colors");
    for (std::uint32_t idx : indices)
        if (idx >= vertices.size())
            throw invalid_input("triangle index out of range");
    for (std::size_t t = 0; t < triangle_count(); ++t) {
        const Vec3& a = vertices[indices[3 * t]];
        const Vec3& b = vertices[indices[3 * t + 1]];
        const Vec3& c = vertices[indices[3 * t + 2]];
        const float area2 = length(cross(b - a, c - a));
        if (area2 * 0.5f <= 1e-12f)
            throw invalid_input("degenerate triangle in mesh");
    }
}

void TriangleMesh::apply_transform(const Mat4& m) {
    for (Vec3& v : vertices) v = m.transform_point(v);
}

TriangleMesh load_obj(const std::string& path, MeshRole role) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open OBJ file: " + path);

    TriangleMesh mesh;
    mesh.role = role;
    bool any_color = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            float x, y, z;
            if (!(ss >> x >> y >> z))
                throw io_error(path + ":" + std::to_string(lineno) +
                               ": malformed vertex line");
            mesh.vertices.push_back({x, y, z});
            float r, g, b;
            if (ss >> r >> g >> b) {
                mesh.vertex_colors.resize(mesh.vertices.size(), {1, 1, 1});
                mesh.vertex_colors.back() = {r, g, b};
                any_color = true;
            } else if (any_color) {
                mesh.vertex_colors.resize(mesh.vertices.size(), {1, 1, 1});
            }
        } else if (tag == "f") {
            std::vector<std::uint32_t> poly;
            std::string vert;
            while (ss >> vert) {
                // accept v, v/vt, v//vn, v/vt/vn; only the position index is used
                const std::size_t slash = vert.find('/');
                const std::string head =
                    slash == std::string::npos ? vert : vert.substr(0, slash);
                long idx = 0;
                try {
                    idx = std::stol(head);
                } catch (...) {
                    throw io_error(path + ":" + std::to_string(lineno) +
                                   ": malformed face index");
                }
                if (idx < 0) idx = static_cast<long>(mesh.vertices.size()) + idx + 1;
                if (idx <= 0 || idx > static_cast<long>(mesh.vertices.size()))
                    throw io_error(path + ":" + std::to_string(lineno) +
                                   ": face index out of range");
                poly.push_back(static_cast<std::uint32_t>(idx - 1));
            }
            if (poly.size() < 3)
                throw io_error(path + ":" + std::to_string(lineno) +
                               ": face needs >= 3 vertices");
            for (std::size_t k = 2; k < poly.size(); ++k) {
                mesh.indices.push_back(poly[0]);
                mesh.indices.push_back(poly[k - 1]);
                mesh.indices.push_back(poly[k]);
            }
        }
        // other tags (vn, vt, o, g, s, mtllib, usemtl, #) are ignored
    }
    if (any_color) mesh.vertex_colors.resize(mesh.vertices.size(), {1, 1, 1});
    return mesh;
}

void save_obj(const std::string& path, const TriangleMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open OBJ file for writing: " + path);
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3& v = mesh.vertices[i];
        out << "v " << v.x << " " << v.y << " " << v.z;
        if (mesh.has_vertex_colors()) {
            const Vec3& c = mesh.vertex_colors[i];
            out << " " << c.x << " " << c.y << " " << c.z;
        }
        out << "\n";
    }
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t)
        out << "f " << mesh.indices[3 * t] + 1 << " " << mesh.indices[3 * t + 1] + 1
            << " " << mesh.indices[3 * t + 2] + 1 << "\n";
    if (!out) throw io_error("failed writing OBJ: " + path);
}

TriangleMesh make_quad(const Vec3& origin, const Vec3& edge_u, const Vec3& edge_v,
                       const Vec3& color, MeshRole role) {
    TriangleMesh mesh;
    mesh.role = role;
    mesh.vertices = {origin, origin + edge_u, origin + edge_u + edge_v,
                     origin + edge_v};
    mesh.vertex_colors.assign(4, color);
    mesh.indices = {0, 1, 2, 0, 2, 3};
    return mesh;
}

TriangleMesh make_box(const Vec3& mn, const Vec3& mx, const Vec3& color,
                      MeshRole role, bool inward_normals) {
    TriangleMesh mesh;
    mesh.role = role;
    mesh.vertices = {{mn.x, mn.y, mn.z}, {mx.x, mn.y, mn.z}, {mx.x, mx.y, mn.z},
                     {mn.x, mx.y, mn.z}, {mn.x, mn.y, mx.z}, {mx.x, mn.y, mx.z},
                     {mx.x, mx.y, mx.z}, {mn.x, mx.y, mx.z}};
    mesh.vertex_colors.assign(8, color);
    // outward-facing winding
    const std::uint32_t faces[6][4] = {
        {1, 5, 6, 2},  // +X
        {4, 0, 3, 7},  // -X
        {3, 2, 6, 7},  // +Y
        {4, 5, 1, 0},  // -Y
        {5, 4, 7, 6},  // +Z
        {0, 1, 2, 3},  // -Z
    };
    for (const auto& q : faces) {
        if (inward_normals) {
            mesh.indices.insert(mesh.indices.end(), {q[0], q[2], q[1]});
            mesh.indices.insert(mesh.indices.end(), {q[0], q[3], q[2]});
        } else {
            mesh.indices.insert(mesh.indices.end(), {q[0], q[1], q[2]});
            mesh.indices.insert(mesh.indices.end(), {q[0], q[2], q[3]});
        }
    }
    return mesh;
}

TriangleMesh make_uv_sphere(const Vec3& center, float radius, int segments,
                            int rings, const Vec3& color, MeshRole role) {
    if (segments < 3 || rings < 2)
        throw invalid_input("sphere needs >= 3 segments and >= 2 rings");
    TriangleMesh mesh;
    mesh.role = role;
    for (int r = 0; r <= rings; ++r) {
        const float phi = 3.14159265358979323846f * r / rings;
        for (int s = 0; s < segments; ++s) {
            const float theta = 2.f * 3.14159265358979323846f * s / segments;
            mesh.vertices.push_back(center +
                                    Vec3{std::sin(phi) * std::cos(theta),
                                         std::cos(phi),
                                         std::sin(phi) * std::sin(theta)} *
                                        radius);
        }
    }
    mesh.vertex_colors.assign(mesh.vertices.size(), color);
    auto vid = [&](int r, int s) {
        return static_cast<std::uint32_t>(r * segments + (s % segments));
    };
    for (int r = 0; r < rings; ++r) {
        for (int s = 0; s < segments; ++s) {
            const auto a = vid(r, s), b = vid(r, s + 1);
            const auto c = vid(r + 1, s + 1), d = vid(r + 1, s);
            if (r != 0) mesh.indices.insert(mesh.indices.end(), {a, b, c});
            if (r != rings - 1) mesh.indices.insert(mesh.indices.end(), {a, c, d});
        }
    }
    return mesh;
}

}  // namespace relight
