#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "canopar/bvh.hpp"
#include "canopar/geometry.hpp"
#include "canopar/plantgen.hpp"
#include "canopar/rng.hpp"

namespace canopar {

inline double convert_spacing(double value, const std::string& unit) {
    if (!(value > 0.0)) throw Error("convert_spacing: value must be > 0");
    if (unit == "m") return value;
    if (unit == "cm") return value * 0.01;
    if (unit == "mm") return value * 0.001;
    if (unit == "inch" || unit == "in") return value * 0.0254;
    throw Error("convert_spacing: unknown unit '" + unit + "'");
}

enum class OrientationMode { OnRowParallel, OffRowParallel, Random };

inline const char* orientation_name(OrientationMode m) {
    switch (m) {
        case OrientationMode::OnRowParallel: return "on_row";
        case OrientationMode::OffRowParallel: return "off_row";
        case OrientationMode::Random: return "random";
    }
    return "?";
}

inline OrientationMode orientation_from_name(const std::string& s) {
    if (s == "on_row") return OrientationMode::OnRowParallel;
    if (s == "off_row") return OrientationMode::OffRowParallel;
    if (s == "random") return OrientationMode::Random;
    throw Error("unknown orientation '" + s + "' (expected on_row|off_row|random)");
}

struct FieldLayout {
    int rows = 1;
    int plants_per_row = 15;
    double row_spacing = 0.762;     // m (30 in)
    double plant_spacing = 0.1524;  // m (6 in)
    double row_azimuth = kPi / 2.0; // row axis, clockwise from north (default E-W)
    OrientationMode orientation = OrientationMode::OffRowParallel;
    std::uint64_t orientation_seed = 1;
    bool periodic = true;

    void validate() const {
        if (rows < 1 || plants_per_row < 1) throw Error("field: rows and plants_per_row must be >= 1");
        if (!(row_spacing > 0.0) || !(plant_spacing > 0.0))
            throw Error("field: spacings must be > 0");
    }
};

// Scene geometry lives in a row-aligned frame: rows run along +x, row-to-row
// along +y, so the periodic cell is axis-aligned for any compass row
// direction. `scene_yaw` converts scene azimuths to world compass azimuths
// (world = scene + scene_yaw); the sun is rotated into this frame before
// tracing.
struct SceneField {
    Mesh mesh;  // canonical-cell geometry (wrap-split when periodic), incl. ground
    Bvh bvh;
    std::optional<PeriodicDomain> domain;
    std::vector<std::pair<int, Vec3>> plant_positions;  // world coordinates
    std::vector<PlantModel> placed_plants;              // scene frame, pre-split
    FieldLayout layout;
    double scene_yaw = 0.0;
    double canopy_top = 0.0;  // max z of plant geometry (m)

    double ground_area() const {
        if (domain) return domain->area();
        Aabb b = mesh.bounds();
        return (b.hi.x - b.lo.x) * (b.hi.y - b.lo.y);
    }

    int plant_count() const { return static_cast<int>(plant_positions.size()); }
};

namespace field_detail {

// Clip a convex polygon against half-plane axis >= bound (side = +1) or
// axis <= bound (side = -1). Sutherland-Hodgman step.
inline void clip_halfplane(std::vector<Vec3>& poly, int axis, double bound, int side) {
    if (poly.empty()) return;
    std::vector<Vec3> out;
    out.reserve(poly.size() + 2);
    auto inside = [&](const Vec3& p) {
        double v = axis == 0 ? p.x : p.y;
        return side > 0 ? v >= bound : v <= bound;
    };
    auto intersect_edge = [&](const Vec3& a, const Vec3& b) {
        double va = axis == 0 ? a.x : a.y;
        double vb = axis == 0 ? b.x : b.y;
        double t = (bound - va) / (vb - va);
        return a + (b - a) * t;
    };
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec3& cur = poly[i];
        const Vec3& nxt = poly[(i + 1) % poly.size()];
        bool cin = inside(cur), nin = inside(nxt);
        if (cin) out.push_back(cur);
        if (cin != nin) out.push_back(intersect_edge(cur, nxt));
    }
    poly = std::move(out);
}

}  // namespace field_detail

// Split triangles that cross lateral cell boundaries and translate every
// piece into the canonical cell, so a segment-wrapped ray sees an exact
// infinite tiling of the cell contents.
inline Mesh wrap_into_domain(const Mesh& mesh, const PeriodicDomain& dom) {
    Mesh out;
    out.triangles.reserve(mesh.size());
    const double eps = 1e-12;
    for (const Triangle& t : mesh.triangles) {
        Aabb b;
        b.expand(t);
        auto cell_lo = [&](double v, double origin, double extent) {
            return static_cast<long>(std::floor((v - origin + eps) / extent));
        };
        auto cell_hi = [&](double v, double origin, double extent) {
            return static_cast<long>(std::floor((v - origin - eps) / extent));
        };
        long i0 = cell_lo(b.lo.x, dom.origin.x, dom.x_extent);
        long i1 = std::max(i0, cell_hi(b.hi.x, dom.origin.x, dom.x_extent));
        long j0 = cell_lo(b.lo.y, dom.origin.y, dom.y_extent);
        long j1 = std::max(j0, cell_hi(b.hi.y, dom.origin.y, dom.y_extent));
        if (i0 == i1 && j0 == j1) {
            Triangle shifted = t;
            Vec3 d{-static_cast<double>(i0) * dom.x_extent, -static_cast<double>(j0) * dom.y_extent, 0.0};
            shifted.v0 += d;
            shifted.v1 += d;
            shifted.v2 += d;
            out.triangles.push_back(shifted);
            continue;
        }
        for (long i = i0; i <= i1; ++i) {
            for (long j = j0; j <= j1; ++j) {
                std::vector<Vec3> poly{t.v0, t.v1, t.v2};
                double x_lo = dom.origin.x + i * dom.x_extent;
                double y_lo = dom.origin.y + j * dom.y_extent;
                field_detail::clip_halfplane(poly, 0, x_lo, +1);
                field_detail::clip_halfplane(poly, 0, x_lo + dom.x_extent, -1);
                field_detail::clip_halfplane(poly, 1, y_lo, +1);
                field_detail::clip_halfplane(poly, 1, y_lo + dom.y_extent, -1);
                if (poly.size() < 3) continue;
                Vec3 d{-static_cast<double>(i) * dom.x_extent, -static_cast<double>(j) * dom.y_extent, 0.0};
                for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
                    Triangle piece = t;
                    piece.v0 = poly[0] + d;
                    piece.v1 = poly[k] + d;
                    piece.v2 = poly[k + 1] + d;
                    if (triangle_area(piece) > kDegeneracyAreaEps) out.triangles.push_back(piece);
                }
            }
        }
    }
    out.renumber();
    return out;
}

namespace field_detail {

inline Mesh make_ground(double x_extent, double y_extent, int nx, int ny) {
    Mesh ground;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            double x0 = x_extent * i / nx, x1 = x_extent * (i + 1) / nx;
            double y0 = y_extent * j / ny, y1 = y_extent * (j + 1) / ny;
            Triangle a, b;
            a.v0 = {x0, y0, 0.0}; a.v1 = {x1, y0, 0.0}; a.v2 = {x1, y1, 0.0};
            b.v0 = {x0, y0, 0.0}; b.v1 = {x1, y1, 0.0}; b.v2 = {x0, y1, 0.0};
            a.organ = b.organ = Organ::Ground;
            a.plant_id = b.plant_id = -1;
            ground.triangles.push_back(a);
            ground.triangles.push_back(b);
        }
    }
    return ground;
}

}  // namespace field_detail

// Replicate `prototype` into a row grid. In the scene frame plant (i, j)
// sits at (i * plant_spacing, j * row_spacing, 0) and the cell extents are
// (plants_per_row * plant_spacing, rows * row_spacing), so the periodic
// tiling continues the same lattice in every direction.
inline SceneField build_field(const FieldLayout& layout, const PlantModel& prototype) {
    layout.validate();
    SceneField field;
    field.layout = layout;
    field.scene_yaw = layout.row_azimuth - kPi / 2.0;

    const int P = layout.plants_per_row;
    const int R = layout.rows;
    const double x_extent = P * layout.plant_spacing;
    const double y_extent = R * layout.row_spacing;

    Mesh assembled;
    field.placed_plants.reserve(static_cast<std::size_t>(P) * R);
    for (int j = 0; j < R; ++j) {
        for (int i = 0; i < P; ++i) {
            int plant_id = j * P + i;
            double target;  // scene-frame leaf axis: rows run along +x (azimuth pi/2)
            switch (layout.orientation) {
                case OrientationMode::OnRowParallel: target = kPi / 2.0; break;
                case OrientationMode::OffRowParallel: target = 0.0; break;
                case OrientationMode::Random:
                default:
                    target = kPi * rng::uniform1(layout.orientation_seed, rng::kFieldOrient, 0,
                                                 static_cast<std::uint32_t>(plant_id), 0);
                    break;
            }
            PlantModel placed =
                prototype.leaf_axis_defined ? reorient(prototype, target) : prototype;
            Vec3 pos{i * layout.plant_spacing, j * layout.row_spacing, 0.0};
            placed.mesh = transform(placed.mesh, 0.0, pos);
            placed.base_anchor += pos;
            for (auto& t : placed.mesh.triangles) t.plant_id = plant_id;
            assembled.triangles.insert(assembled.triangles.end(), placed.mesh.triangles.begin(),
                                       placed.mesh.triangles.end());
            // World-frame position: scene rotated so rows point at row_azimuth.
            field.plant_positions.emplace_back(plant_id, rotate_z(pos, -field.scene_yaw));
            field.placed_plants.push_back(std::move(placed));
        }
    }

    Aabb plant_bounds = assembled.bounds();
    field.canopy_top = assembled.empty() ? 0.0 : plant_bounds.hi.z;

    int nx = std::clamp(2 * P, 8, 64);
    int ny = std::clamp(2 * R, 8, 64);
    Mesh ground = field_detail::make_ground(x_extent, y_extent, nx, ny);
    assembled.triangles.insert(assembled.triangles.end(), ground.triangles.begin(),
                               ground.triangles.end());

    if (layout.periodic) {
        PeriodicDomain dom;
        dom.x_extent = x_extent;
        dom.y_extent = y_extent;
        field.domain = dom;
        field.mesh = wrap_into_domain(assembled, dom);
    } else {
        field.mesh = std::move(assembled);
        field.mesh.renumber();
    }
    field.bvh = build_bvh(field.mesh.triangles);
    return field;
}

// Ad-hoc scene from raw geometry (tests, analytic setups). Ground triangles
// must already be part of `mesh` if wanted.
inline SceneField make_scene(Mesh mesh, std::optional<PeriodicDomain> domain = std::nullopt,
                             bool wrap_geometry = true) {
    if (mesh.empty()) throw Error("make_scene: empty mesh");
    SceneField field;
    field.layout.periodic = domain.has_value();
    field.domain = domain;
    double top = 0.0;
    for (const auto& t : mesh.triangles)
        if (t.organ != Organ::Ground)
            top = std::max({top, t.v0.z, t.v1.z, t.v2.z});
    field.canopy_top = top;
    int max_plant = -1;
    for (const auto& t : mesh.triangles) max_plant = std::max(max_plant, t.plant_id);
    for (int id = 0; id <= max_plant; ++id) field.plant_positions.emplace_back(id, Vec3{});
    if (domain && wrap_geometry) field.mesh = wrap_into_domain(mesh, *domain);
    else {
        field.mesh = std::move(mesh);
        field.mesh.renumber();
    }
    field.bvh = build_bvh(field.mesh.triangles);
    return field;
}

}  // namespace canopar
