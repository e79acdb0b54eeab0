#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "canopar/vec3.hpp"

namespace canopar {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegeneracyAreaEps = 1e-12;  // m^2; triangles below this are dropped
inline constexpr double kRayOffsetEps = 1e-6;        // m; secondary-ray origin offset

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

enum class Organ : std::uint8_t { Leaf = 0, Stem = 1, Ground = 2 };

inline const char* organ_name(Organ o) {
    switch (o) {
        case Organ::Leaf: return "leaf";
        case Organ::Stem: return "stem";
        case Organ::Ground: return "ground";
    }
    return "?";
}

struct Triangle {
    Vec3 v0, v1, v2;
    std::int32_t plant_id = -1;   // -1 for ground / unassigned
    Organ organ = Organ::Leaf;
    std::uint32_t primitive_id = 0;
};

inline double triangle_area(const Triangle& t) {
    return 0.5 * norm(cross(t.v1 - t.v0, t.v2 - t.v0));
}

// Geometric normal from winding (not normalized by area sign; leaves are two-sided).
inline Vec3 triangle_normal(const Triangle& t) {
    return normalized(cross(t.v1 - t.v0, t.v2 - t.v0));
}

inline Vec3 triangle_centroid(const Triangle& t) {
    return (t.v0 + t.v1 + t.v2) / 3.0;
}

struct Aabb {
    Vec3 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
            std::numeric_limits<double>::max()};
    Vec3 hi{-std::numeric_limits<double>::max(), -std::numeric_limits<double>::max(),
            -std::numeric_limits<double>::max()};

    void expand(const Vec3& p) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y); lo.z = std::min(lo.z, p.z);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y); hi.z = std::max(hi.z, p.z);
    }
    void expand(const Aabb& b) { expand(b.lo); expand(b.hi); }
    void expand(const Triangle& t) { expand(t.v0); expand(t.v1); expand(t.v2); }

    bool valid() const { return lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z; }
    bool contains(const Vec3& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
    }
    Vec3 extent() const { return hi - lo; }
    Vec3 center() const { return (lo + hi) * 0.5; }
    int longest_axis() const {
        Vec3 e = extent();
        if (e.x >= e.y && e.x >= e.z) return 0;
        return e.y >= e.z ? 1 : 2;
    }
};

struct Mesh {
    std::vector<Triangle> triangles;

    bool empty() const { return triangles.empty(); }
    std::size_t size() const { return triangles.size(); }

    double area() const {
        double a = 0.0;
        for (const auto& t : triangles) a += triangle_area(t);
        return a;
    }

    double area(Organ organ) const {
        double a = 0.0;
        for (const auto& t : triangles)
            if (t.organ == organ) a += triangle_area(t);
        return a;
    }

    Aabb bounds() const {
        Aabb b;
        for (const auto& t : triangles) b.expand(t);
        return b;
    }

    // Assign primitive ids by position; call after any concatenation or edit.
    void renumber() {
        for (std::size_t i = 0; i < triangles.size(); ++i)
            triangles[i].primitive_id = static_cast<std::uint32_t>(i);
    }

    void append(const Mesh& other) {
        triangles.insert(triangles.end(), other.triangles.begin(), other.triangles.end());
        renumber();
    }
};

// Rigid transform: rotate by yaw (counterclockwise about +z, right-hand rule)
// around `anchor`, then translate. Areas and pairwise distances are preserved.
inline Vec3 transform_point(const Vec3& p, double yaw, const Vec3& translation, const Vec3& anchor) {
    return rotate_z(p - anchor, yaw) + anchor + translation;
}

inline Mesh transform(const Mesh& mesh, double yaw, const Vec3& translation,
                      const Vec3& anchor = Vec3{}) {
    Mesh out = mesh;
    for (auto& t : out.triangles) {
        t.v0 = transform_point(t.v0, yaw, translation, anchor);
        t.v1 = transform_point(t.v1, yaw, translation, anchor);
        t.v2 = transform_point(t.v2, yaw, translation, anchor);
    }
    return out;
}

struct Ray {
    Vec3 origin;
    Vec3 dir;  // unit length
    double t_min = 0.0;
    double t_max = std::numeric_limits<double>::infinity();
};

struct Hit {
    std::uint32_t primitive_id = 0;
    double distance = 0.0;        // cumulative across periodic wraps
    bool entering_front_face = false;  // true if the ray hit the +normal side
};

// Lateral (x/y) periodic cell. Vertical faces never wrap.
struct PeriodicDomain {
    double x_extent = 0.0;
    double y_extent = 0.0;
    Vec3 origin{};

    double area() const { return x_extent * y_extent; }

    bool contains_lateral(const Vec3& p) const {
        return p.x >= origin.x && p.x <= origin.x + x_extent &&
               p.y >= origin.y && p.y <= origin.y + y_extent;
    }

    // Translate p laterally by whole periods into the canonical cell.
    Vec3 canonical(const Vec3& p) const {
        Vec3 q = p;
        q.x = origin.x + wrap_coord(p.x - origin.x, x_extent);
        q.y = origin.y + wrap_coord(p.y - origin.y, y_extent);
        return q;
    }

    static double wrap_coord(double v, double extent) {
        double w = std::fmod(v, extent);
        if (w < 0.0) w += extent;
        return w;
    }
};

// Moller-Trumbore, double precision, two-sided (no back-face culling).
// Returns the ray parameter t in [t_min, t_max], or nothing.
inline std::optional<double> ray_triangle_intersect(const Ray& ray, const Vec3& v0,
                                                    const Vec3& v1, const Vec3& v2) {
    const Vec3 e1 = v1 - v0;
    const Vec3 e2 = v2 - v0;
    const Vec3 pvec = cross(ray.dir, e2);
    const double det = dot(e1, pvec);
    if (std::abs(det) < 1e-14) return std::nullopt;
    const double inv_det = 1.0 / det;
    const Vec3 tvec = ray.origin - v0;
    const double u = dot(tvec, pvec) * inv_det;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 qvec = cross(tvec, e1);
    const double v = dot(ray.dir, qvec) * inv_det;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    const double t = dot(e2, qvec) * inv_det;
    if (t < ray.t_min || t > ray.t_max) return std::nullopt;
    return t;
}

}  // namespace canopar
