#include "relight/bvh.hpp"

#include <algorithm>
#include <cmath>

namespace relight {

bool intersect_triangle(const BvhTriangle& tri, const Vec3& o, const Vec3& d,
                        float tmin, float tmax, float& t, float& u, float& v) {
    const Vec3 e1 = tri.p1 - tri.p0;
    const Vec3 e2 = tri.p2 - tri.p0;
    const Vec3 pvec = cross(d, e2);
    const float det = dot(e1, pvec);
    if (std::fabs(det) < 1e-12f) return false;
    const float inv_det = 1.f / det;
    const Vec3 tvec = o - tri.p0;
    u = dot(tvec, pvec) * inv_det;
    if (u < 0.f || u > 1.f) return false;
    const Vec3 qvec = cross(tvec, e1);
    v = dot(d, qvec) * inv_det;
    if (v < 0.f || u + v > 1.f) return false;
    t = dot(e2, qvec) * inv_det;
    return t > tmin && t < tmax;
}

namespace {

struct PrimInfo {
    Vec3 bmin, bmax, centroid;
};

float surface_area(const Vec3& mn, const Vec3& mx) {
    const Vec3 d = mx - mn;
    return 2.f * (d.x * d.y + d.y * d.z + d.z * d.x);
}

}  // namespace

void Bvh::build(std::vector<BvhTriangle> triangles) {
    tris_ = std::move(triangles);
    nodes_.clear();
    if (tris_.empty()) {
        root_min_ = root_max_ = {0, 0, 0};
        return;
    }
    nodes_.reserve(2 * tris_.size());
    build_node(0, static_cast<std::uint32_t>(tris_.size()));
    root_min_ = nodes_[0].bmin;
    root_max_ = nodes_[0].bmax;
}

std::uint32_t Bvh::build_node(std::uint32_t first, std::uint32_t count) {
    const std::uint32_t node_index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();

    Vec3 bmin{1e30f, 1e30f, 1e30f}, bmax{-1e30f, -1e30f, -1e30f};
    Vec3 cmin{1e30f, 1e30f, 1e30f}, cmax{-1e30f, -1e30f, -1e30f};
    for (std::uint32_t i = first; i < first + count; ++i) {
        const BvhTriangle& t = tris_[i];
        const Vec3 tmin = min(t.p0, min(t.p1, t.p2));
        const Vec3 tmax = max(t.p0, max(t.p1, t.p2));
        bmin = min(bmin, tmin);
        bmax = max(bmax, tmax);
        const Vec3 c = (tmin + tmax) * 0.5f;
        cmin = min(cmin, c);
        cmax = max(cmax, c);
    }
    nodes_[node_index].bmin = bmin;
    nodes_[node_index].bmax = bmax;

    constexpr std::uint32_t kLeafSize = 4;
    const Vec3 cext = cmax - cmin;
    const int axis = cext.x > cext.y ? (cext.x > cext.z ? 0 : 2)
                                     : (cext.y > cext.z ? 1 : 2);
    if (count <= kLeafSize || cext[axis] < 1e-12f) {
        nodes_[node_index].first = first;
        nodes_[node_index].count = count;
        return node_index;
    }

    // Binned SAH along the widest centroid axis.
    constexpr int kBins = 16;
    struct Bin {
        Vec3 bmin{1e30f, 1e30f, 1e30f}, bmax{-1e30f, -1e30f, -1e30f};
        std::uint32_t count = 0;
    };
    Bin bins[kBins];
    auto centroid_axis = [&](const BvhTriangle& t) {
        const Vec3 c = (min(t.p0, min(t.p1, t.p2)) + max(t.p0, max(t.p1, t.p2))) * 0.5f;
        return c[axis];
    };
    auto bin_of = [&](const BvhTriangle& t) {
        const float rel = (centroid_axis(t) - cmin[axis]) / cext[axis];
        return std::min(kBins - 1, static_cast<int>(rel * kBins));
    };
    for (std::uint32_t i = first; i < first + count; ++i) {
        const BvhTriangle& t = tris_[i];
        Bin& b = bins[bin_of(t)];
        b.bmin = min(b.bmin, min(t.p0, min(t.p1, t.p2)));
        b.bmax = max(b.bmax, max(t.p0, max(t.p1, t.p2)));
        ++b.count;
    }

    float best_cost = 1e30f;
    int best_split = -1;
    for (int split = 1; split < kBins; ++split) {
        Vec3 lmin{1e30f, 1e30f, 1e30f}, lmax{-1e30f, -1e30f, -1e30f};
        Vec3 rmin = lmin, rmax = lmax;
        std::uint32_t lcount = 0, rcount = 0;
        for (int b = 0; b < split; ++b) {
            if (!bins[b].count) continue;
            lmin = min(lmin, bins[b].bmin);
            lmax = max(lmax, bins[b].bmax);
            lcount += bins[b].count;
        }
        for (int b = split; b < kBins; ++b) {
            if (!bins[b].count) continue;
            rmin = min(rmin, bins[b].bmin);
            rmax = max(rmax, bins[b].bmax);
            rcount += bins[b].count;
        }
        if (!lcount || !rcount) continue;
        const float cost = lcount * surface_area(lmin, lmax) +
                           rcount * surface_area(rmin, rmax);
        if (cost < best_cost) {
            best_cost = cost;
            best_split = split;
        }
    }

    auto mid_it = tris_.begin() + first;
    if (best_split >= 0) {
        mid_it = std::partition(tris_.begin() + first,
                                tris_.begin() + first + count,
                                [&](const BvhTriangle& t) {
                                    return bin_of(t) < best_split;
                                });
    }
    std::uint32_t mid = static_cast<std::uint32_t>(mid_it - tris_.begin());
    if (mid == first || mid == first + count) {
        // SAH failed to separate; median split keeps the tree balanced.
        mid = first + count / 2;
        std::nth_element(tris_.begin() + first, tris_.begin() + mid,
                         tris_.begin() + first + count,
                         [&](const BvhTriangle& a, const BvhTriangle& b) {
                             return centroid_axis(a) < centroid_axis(b);
                         });
    }

    build_node(first, mid - first);  // left child lands at node_index + 1
    const std::uint32_t right = build_node(mid, first + count - mid);
    nodes_[node_index].first = right;
    nodes_[node_index].count = 0;
    return node_index;
}

}  // namespace relight
