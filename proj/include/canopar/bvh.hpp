#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "canopar/geometry.hpp"

namespace canopar {

// Median-split BVH over a triangle soup. Construction is deterministic for a
// fixed input order; traversal ties (equal distance) resolve to the smaller
// primitive_id so that BVH and brute-force scans agree exactly.
class Bvh {
public:
    struct Node {
        Aabb box;
        std::uint32_t left = 0;   // inner: left child index; leaf: first slot in prim_order_
        std::uint32_t count = 0;  // leaf: primitive count; inner: 0
        std::uint32_t right = 0;  // inner: right child index
    };

    Bvh() = default;

    static Bvh build(std::span<const Triangle> triangles) {
        if (triangles.empty()) throw Error("build_bvh: empty triangle list");
        Bvh bvh;
        bvh.prim_order_.resize(triangles.size());
        std::iota(bvh.prim_order_.begin(), bvh.prim_order_.end(), 0u);
        std::vector<Vec3> centroids(triangles.size());
        std::vector<Aabb> boxes(triangles.size());
        for (std::size_t i = 0; i < triangles.size(); ++i) {
            centroids[i] = triangle_centroid(triangles[i]);
            Aabb b;
            b.expand(triangles[i]);
            boxes[i] = b;
        }
        bvh.nodes_.reserve(triangles.size() * 2);
        bvh.build_node(0, static_cast<std::uint32_t>(triangles.size()), centroids, boxes, 0);
        return bvh;
    }

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<std::uint32_t>& primitive_order() const { return prim_order_; }
    bool empty() const { return nodes_.empty(); }
    const Aabb& root_bounds() const { return nodes_.front().box; }

    // Nearest hit within [ray.t_min, ray.t_max]; single (non-periodic) pass.
    // Exact ties resolve to the smaller primitive_id, matching a linear scan.
    std::optional<Hit> intersect(std::span<const Triangle> tris, const Ray& ray) const {
        double best_t = ray.t_max;
        std::uint32_t best_prim = 0;
        bool found = false;
        walk(tris, ray, [&](std::uint32_t prim, double t) {
            if (!found || t < best_t || (t == best_t && prim < best_prim)) {
                best_t = t;
                best_prim = prim;
                found = true;
            }
            return false;  // keep searching
        }, /*shrink_t=*/&best_t);
        if (!found) return std::nullopt;
        Hit h;
        h.primitive_id = best_prim;
        h.distance = best_t;
        h.entering_front_face = dot(ray.dir, triangle_normal(tris[best_prim])) < 0.0;
        return h;
    }

    // Any-hit within [ray.t_min, ray.t_max]; early exit.
    bool occluded(std::span<const Triangle> tris, const Ray& ray) const {
        bool hit = false;
        walk(tris, ray, [&](std::uint32_t, double) {
            hit = true;
            return true;  // stop
        }, nullptr);
        return hit;
    }

private:
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> prim_order_;

    static constexpr std::uint32_t kLeafSize = 4;
    static constexpr int kMaxDepth = 64;

    std::uint32_t build_node(std::uint32_t first, std::uint32_t count,
                             const std::vector<Vec3>& centroids,
                             const std::vector<Aabb>& boxes, int depth) {
        std::uint32_t node_index = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
        Aabb box;
        Aabb centroid_box;
        for (std::uint32_t i = first; i < first + count; ++i) {
            box.expand(boxes[prim_order_[i]]);
            centroid_box.expand(centroids[prim_order_[i]]);
        }
        nodes_[node_index].box = box;
        if (count <= kLeafSize || depth >= kMaxDepth) {
            nodes_[node_index].left = first;
            nodes_[node_index].count = count;
            return node_index;
        }
        int axis = centroid_box.longest_axis();
        std::uint32_t mid = first + count / 2;
        std::nth_element(prim_order_.begin() + first, prim_order_.begin() + mid,
                         prim_order_.begin() + first + count,
                         [&](std::uint32_t a, std::uint32_t b) {
                             double ca = centroids[a][axis], cb = centroids[b][axis];
                             if (ca != cb) return ca < cb;
                             return a < b;
                         });
        std::uint32_t left = build_node(first, mid - first, centroids, boxes, depth + 1);
        std::uint32_t right = build_node(mid, first + count - mid, centroids, boxes, depth + 1);
        nodes_[node_index].left = left;
        nodes_[node_index].right = right;
        nodes_[node_index].count = 0;
        return node_index;
    }

    // Axis-parallel rays take the containment branch; this avoids the 0 * inf
    // NaN when the origin sits exactly on a box face.
    static bool slab_axis(double lo, double hi, double o, double inv, double& t_min,
                          double& t_max) {
        if (!std::isfinite(inv)) return o >= lo && o <= hi;
        double t0 = (lo - o) * inv;
        double t1 = (hi - o) * inv;
        if (t0 > t1) std::swap(t0, t1);
        t_min = std::max(t_min, t0);
        t_max = std::min(t_max, t1);
        return t_min <= t_max;
    }

    static bool slab_test(const Aabb& box, const Vec3& o, const Vec3& inv_dir,
                          double t_min, double t_max) {
        return slab_axis(box.lo.x, box.hi.x, o.x, inv_dir.x, t_min, t_max) &&
               slab_axis(box.lo.y, box.hi.y, o.y, inv_dir.y, t_min, t_max) &&
               slab_axis(box.lo.z, box.hi.z, o.z, inv_dir.z, t_min, t_max);
    }

    // Visits every primitive intersection in [t_min, current t_max]. The
    // callback returns true to stop. `shrink_t` (nearest-hit mode) lets the
    // traversal tighten its far bound as hits are found.
    template <class Callback>
    void walk(std::span<const Triangle> tris, const Ray& ray, Callback&& cb,
              const double* shrink_t) const {
        if (nodes_.empty()) return;
        const Vec3 inv_dir{1.0 / ray.dir.x, 1.0 / ray.dir.y, 1.0 / ray.dir.z};
        std::uint32_t stack[128];
        int sp = 0;
        stack[sp++] = 0;
        while (sp > 0) {
            const Node& node = nodes_[stack[--sp]];
            double far = shrink_t ? std::min(*shrink_t, ray.t_max) : ray.t_max;
            if (!slab_test(node.box, ray.origin, inv_dir, ray.t_min, far)) continue;
            if (node.count > 0) {
                for (std::uint32_t i = node.left; i < node.left + node.count; ++i) {
                    std::uint32_t prim = prim_order_[i];
                    const Triangle& t = tris[prim];
                    Ray r = ray;
                    r.t_max = far;
                    if (auto hit_t = ray_triangle_intersect(r, t.v0, t.v1, t.v2)) {
                        if (cb(prim, *hit_t)) return;
                    }
                }
            } else {
                stack[sp++] = node.right;
                stack[sp++] = node.left;
            }
        }
    }
};

inline Bvh build_bvh(std::span<const Triangle> triangles) { return Bvh::build(triangles); }

namespace detail {

// Distance to the nearest lateral domain face along the ray, or +inf when the
// ray never leaves the cell laterally.
inline double lateral_exit_distance(const PeriodicDomain& dom, const Vec3& o, const Vec3& d) {
    double t_exit = std::numeric_limits<double>::infinity();
    if (d.x > 1e-15) t_exit = std::min(t_exit, (dom.origin.x + dom.x_extent - o.x) / d.x);
    else if (d.x < -1e-15) t_exit = std::min(t_exit, (dom.origin.x - o.x) / d.x);
    if (d.y > 1e-15) t_exit = std::min(t_exit, (dom.origin.y + dom.y_extent - o.y) / d.y);
    else if (d.y < -1e-15) t_exit = std::min(t_exit, (dom.origin.y - o.y) / d.y);
    return std::max(t_exit, 0.0);
}

// Advance to the exit point and re-enter through the opposite face(s).
inline Vec3 reenter(const PeriodicDomain& dom, const Vec3& o, const Vec3& d, double t_exit) {
    Vec3 p = o + d * t_exit;
    const double snap = 1e-9;
    if (p.x >= dom.origin.x + dom.x_extent - snap && d.x > 0.0) p.x = dom.origin.x;
    else if (p.x <= dom.origin.x + snap && d.x < 0.0) p.x = dom.origin.x + dom.x_extent;
    if (p.y >= dom.origin.y + dom.y_extent - snap && d.y > 0.0) p.y = dom.origin.y;
    else if (p.y <= dom.origin.y + snap && d.y < 0.0) p.y = dom.origin.y + dom.y_extent;
    return p;
}

}  // namespace detail

// Nearest hit along a ray with lateral periodic wrapping. The ray is traced
// segment by segment; each time it exits a lateral face it re-enters on the
// opposite side with distance accumulating. max_wraps = 0 disables wrapping
// and reproduces the non-periodic result exactly.
inline std::optional<Hit> intersect(const Bvh& bvh, std::span<const Triangle> tris, const Ray& ray,
                                    const std::optional<PeriodicDomain>& domain = std::nullopt,
                                    int max_wraps = 4) {
    if (!domain || max_wraps == 0) return bvh.intersect(tris, ray);
    Vec3 origin = domain->canonical(ray.origin);
    double traveled = 0.0;
    const Aabb& scene_box = bvh.root_bounds();
    for (int wrap = 0; wrap <= max_wraps; ++wrap) {
        double t_exit = detail::lateral_exit_distance(*domain, origin, ray.dir);
        Ray seg;
        seg.origin = origin;
        seg.dir = ray.dir;
        seg.t_min = std::max(0.0, ray.t_min - traveled);
        seg.t_max = std::min(t_exit, ray.t_max - traveled);
        if (seg.t_max >= seg.t_min) {
            if (auto h = bvh.intersect(tris, seg)) {
                h->distance += traveled;
                return h;
            }
        }
        if (!std::isfinite(t_exit) || traveled + t_exit >= ray.t_max) return std::nullopt;
        // Above (or below) all geometry and receding: no further hit possible.
        if ((origin.z > scene_box.hi.z && ray.dir.z >= 0.0) ||
            (origin.z < scene_box.lo.z && ray.dir.z <= 0.0))
            return std::nullopt;
        origin = detail::reenter(*domain, origin, ray.dir, t_exit);
        traveled += t_exit;
    }
    return std::nullopt;
}

// Any-hit variant used by shadow rays.
inline bool occluded(const Bvh& bvh, std::span<const Triangle> tris, const Ray& ray,
                     const std::optional<PeriodicDomain>& domain = std::nullopt,
                     int max_wraps = 4) {
    if (!domain || max_wraps == 0) return bvh.occluded(tris, ray);
    Vec3 origin = domain->canonical(ray.origin);
    double traveled = 0.0;
    const Aabb& scene_box = bvh.root_bounds();
    for (int wrap = 0; wrap <= max_wraps; ++wrap) {
        double t_exit = detail::lateral_exit_distance(*domain, origin, ray.dir);
        Ray seg;
        seg.origin = origin;
        seg.dir = ray.dir;
        seg.t_min = std::max(0.0, ray.t_min - traveled);
        seg.t_max = std::min(t_exit, ray.t_max - traveled);
        if (seg.t_max >= seg.t_min && bvh.occluded(tris, seg)) return true;
        if (!std::isfinite(t_exit) || traveled + t_exit >= ray.t_max) return false;
        if ((origin.z > scene_box.hi.z && ray.dir.z >= 0.0) ||
            (origin.z < scene_box.lo.z && ray.dir.z <= 0.0))
            return false;
        origin = detail::reenter(*domain, origin, ray.dir, t_exit);
        traveled += t_exit;
    }
    return false;
}

}  // namespace canopar
