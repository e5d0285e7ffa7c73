#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "relight/vecmath.hpp"

namespace relight {

struct BvhTriangle {
    Vec3 p0, p1, p2;
    std::uint32_t mesh_index = 0;
    std::uint32_t tri_index = 0;
};

struct TriangleHit {
    float t = std::numeric_limits<float>::infinity();
    float u = 0.f, v = 0.f;  // barycentrics of p1/p2
    std::uint32_t prim = 0;  // index into the BVH's triangle array
};

// Watertight-enough Moller-Trumbore intersection; returns t in (tmin, tmax).
bool intersect_triangle(const BvhTriangle& tri, const Vec3& o, const Vec3& d,
                        float tmin, float tmax, float& t, float& u, float& v);

// Binary BVH with binned surface-area-heuristic splits and a median-split
// fallback. Build order is fully deterministic.
class Bvh {
public:
    void build(std::vector<BvhTriangle> triangles);

    const std::vector<BvhTriangle>& triangles() const { return tris_; }
    bool empty() const { return tris_.empty(); }
    Vec3 bounds_min() const { return root_min_; }
    Vec3 bounds_max() const { return root_max_; }

    // Closest hit among primitives accepted by `accept(prim_index)`.
    template <typename Accept>
    bool intersect(const Vec3& o, const Vec3& d, float tmin, float tmax,
                   Accept&& accept, TriangleHit& hit) const {
        if (nodes_.empty()) return false;
        const Vec3 inv_d{1.f / d.x, 1.f / d.y, 1.f / d.z};
        hit.t = tmax;
        bool found = false;
        std::uint32_t stack[64];
        int sp = 0;
        stack[sp++] = 0;
        while (sp > 0) {
            const std::uint32_t ni = stack[--sp];
            const Node& node = nodes_[ni];
            if (!hit_aabb(node, o, inv_d, tmin, hit.t)) continue;
            if (node.count > 0) {
                for (std::uint32_t i = 0; i < node.count; ++i) {
                    const std::uint32_t p = node.first + i;
                    if (!accept(p)) continue;
                    float t, u, v;
                    if (intersect_triangle(tris_[p], o, d, tmin, hit.t, t, u, v)) {
                        hit.t = t;
                        hit.u = u;
                        hit.v = v;
                        hit.prim = p;
                        found = true;
                    }
                }
            } else {
                stack[sp++] = node.first;  // right child
                stack[sp++] = ni + 1;      // left child follows its parent
            }
        }
        return found;
    }

    // True as soon as any accepted primitive blocks (tmin, tmax).
    template <typename Accept>
    bool any_hit(const Vec3& o, const Vec3& d, float tmin, float tmax,
                 Accept&& accept) const {
        if (nodes_.empty()) return false;
        const Vec3 inv_d{1.f / d.x, 1.f / d.y, 1.f / d.z};
        std::uint32_t stack[64];
        int sp = 0;
        stack[sp++] = 0;
        while (sp > 0) {
            const std::uint32_t ni = stack[--sp];
            const Node& node = nodes_[ni];
            if (!hit_aabb(node, o, inv_d, tmin, tmax)) continue;
            if (node.count > 0) {
                for (std::uint32_t i = 0; i < node.count; ++i) {
                    const std::uint32_t p = node.first + i;
                    if (!accept(p)) continue;
                    float t, u, v;
                    if (intersect_triangle(tris_[p], o, d, tmin, tmax, t, u, v))
                        return true;
                }
            } else {
                stack[sp++] = node.first;
                stack[sp++] = ni + 1;
            }
        }
        return false;
    }

private:
    struct Node {
        Vec3 bmin, bmax;
        // Leaf: first primitive index. Internal: right child index (the left
        // child is always the node immediately after its parent).
        std::uint32_t first = 0;
        std::uint32_t count = 0;  // 0 for internal nodes
    };

    static bool hit_aabb(const Node& n, const Vec3& o, const Vec3& inv_d,
                         float tmin, float tmax) {
        for (int a = 0; a < 3; ++a) {
            const float t0 = (n.bmin[a] - o[a]) * inv_d[a];
            const float t1 = (n.bmax[a] - o[a]) * inv_d[a];
            tmin = std::fmax(tmin, std::fmin(t0, t1));
            tmax = std::fmin(tmax, std::fmax(t0, t1));
        }
        return tmin <= tmax;
    }

    std::uint32_t build_node(std::uint32_t first, std::uint32_t count);

    std::vector<BvhTriangle> tris_;
    std::vector<Node> nodes_;
    Vec3 root_min_, root_max_;
};

}  // namespace relight
