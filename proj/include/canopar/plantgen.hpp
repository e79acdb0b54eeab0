#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "canopar/geometry.hpp"
#include "canopar/rng.hpp"

namespace canopar {

// Procedural maize plant: a tapered stem plus distichous (alternating ~180
// degree) leaves built as curved strips along a drooping midrib. A stand-in
// for scanned field plants; deterministic for a fixed seed.
struct PlantParams {
    double height = 1.8;            // m, stem height
    int leaf_count = 10;
    double leaf_length = 0.55;      // m, midrib arc length
    double leaf_width = 0.09;       // m, maximum blade width
    double phyllotaxy_base_azimuth = 0.0;  // rad, leaf-plane compass axis
    double phyllotaxy_noise_sd = 0.12;     // rad, per-leaf azimuth jitter
    double leaf_inclination = 0.75; // rad above horizontal at the leaf base
    double curvature = 0.9;         // droop coefficient, 0 = straight blade
    double stem_radius = 0.012;     // m at the base
    int segments_per_leaf = 12;
    std::uint64_t seed = 1;

    void validate() const {
        if (!(height > 0.0)) throw Error("plant: height must be > 0");
        if (leaf_count < 0) throw Error("plant: leaf_count must be >= 0");
        if (!(leaf_inclination >= 0.0 && leaf_inclination < kPi / 2.0))
            throw Error("plant: leaf_inclination must be in [0, pi/2)");
        if (segments_per_leaf < 2) throw Error("plant: segments_per_leaf must be >= 2");
        if (!(leaf_length > 0.0) || !(leaf_width > 0.0)) throw Error("plant: leaf size must be > 0");
        if (!(stem_radius > 0.0)) throw Error("plant: stem_radius must be > 0");
    }
};

struct PlantModel {
    Mesh mesh;
    Vec3 base_anchor{0.0, 0.0, 0.0};  // stem base, z = 0
    double leaf_plane_azimuth = 0.0;  // rad mod pi; the estimated axis
    bool leaf_axis_defined = false;   // false for leafless / isotropic plants
    double total_leaf_area = 0.0;     // m^2, one-sided
};

namespace plantgen_detail {

inline void push_triangle(Mesh& mesh, const Vec3& a, const Vec3& b, const Vec3& c, Organ organ) {
    Triangle t;
    t.v0 = a;
    t.v1 = b;
    t.v2 = c;
    t.organ = organ;
    if (triangle_area(t) > kDegeneracyAreaEps) mesh.triangles.push_back(t);
}

inline void append_stem(Mesh& mesh, const PlantParams& p) {
    constexpr int kSides = 8;
    const int rings = 8;
    auto radius_at = [&](double z) { return p.stem_radius * (1.0 - 0.4 * z / p.height); };
    std::vector<Vec3> prev(kSides), cur(kSides);
    for (int r = 0; r <= rings; ++r) {
        double z = p.height * r / rings;
        double rad = radius_at(z);
        for (int s = 0; s < kSides; ++s) {
            double a = 2.0 * kPi * s / kSides;
            cur[s] = {rad * std::cos(a), rad * std::sin(a), z};
        }
        if (r > 0) {
            for (int s = 0; s < kSides; ++s) {
                int sn = (s + 1) % kSides;
                push_triangle(mesh, prev[s], prev[sn], cur[sn], Organ::Stem);
                push_triangle(mesh, prev[s], cur[sn], cur[s], Organ::Stem);
            }
        }
        prev = cur;
    }
    Vec3 apex{0.0, 0.0, p.height};
    for (int s = 0; s < kSides; ++s) push_triangle(mesh, prev[s], prev[(s + 1) % kSides], apex, Organ::Stem);
}

// Midrib node positions: unit-speed curve in the vertical plane of `azimuth`,
// starting at `base` with inclination `theta0` above horizontal and tangent
// angle drooping quadratically with arc length (tip turns below horizontal
// for curvature near 1).
inline std::vector<Vec3> midrib_nodes(const Vec3& base, double azimuth, double theta0,
                                      double curvature, double length, int segments) {
    const Vec3 along = azimuth_direction(azimuth);
    const double droop_total = curvature * (theta0 + kPi / 4.0);
    std::vector<Vec3> nodes(segments + 1);
    nodes[0] = base;
    const int kSub = 16;
    Vec3 pos = base;
    for (int j = 0; j < segments; ++j) {
        double ds = length / segments / kSub;
        for (int k = 0; k < kSub; ++k) {
            double u = (j + (k + 0.5) / kSub) / segments;
            double theta = theta0 - droop_total * u * u;
            pos += (along * std::cos(theta) + Vec3{0.0, 0.0, std::sin(theta)}) * ds;
        }
        nodes[j + 1] = pos;
    }
    return nodes;
}

inline void append_leaf(Mesh& mesh, const PlantParams& p, double attach_z, double azimuth) {
    const Vec3 along = azimuth_direction(azimuth);
    const Vec3 rail{along.y, -along.x, 0.0};  // horizontal, perpendicular to the blade plane
    const double stem_r = p.stem_radius * (1.0 - 0.4 * attach_z / p.height);
    const Vec3 base = along * stem_r + Vec3{0.0, 0.0, attach_z};
    auto nodes = midrib_nodes(base, azimuth, p.leaf_inclination, p.curvature, p.leaf_length,
                              p.segments_per_leaf);
    const int n = p.segments_per_leaf;
    for (int j = 0; j < n; ++j) {
        double w0 = p.leaf_width * std::sin(kPi * j / n);
        double w1 = p.leaf_width * std::sin(kPi * (j + 1) / n);
        Vec3 l0 = nodes[j] - rail * (0.5 * w0), r0 = nodes[j] + rail * (0.5 * w0);
        Vec3 l1 = nodes[j + 1] - rail * (0.5 * w1), r1 = nodes[j + 1] + rail * (0.5 * w1);
        push_triangle(mesh, l0, r0, r1, Organ::Leaf);
        push_triangle(mesh, l0, r1, l1, Organ::Leaf);
    }
}

}  // namespace plantgen_detail

// Area-weighted principal axis of leaf-triangle centroids projected onto the
// horizontal plane, as a compass azimuth in [0, pi). Throws when the mesh has
// no leaf triangles or the horizontal scatter is too isotropic to define an
// axis (largest/smallest eigenvalue ratio below 1.05).
inline double estimate_leaf_plane_azimuth(const Mesh& mesh) {
    double wsum = 0.0, mx = 0.0, my = 0.0;
    for (const auto& t : mesh.triangles) {
        if (t.organ != Organ::Leaf) continue;
        double w = triangle_area(t);
        Vec3 c = triangle_centroid(t);
        wsum += w;
        mx += w * c.x;
        my += w * c.y;
    }
    if (wsum <= 0.0) throw Error("estimate_leaf_plane_azimuth: mesh has no leaf triangles");
    mx /= wsum;
    my /= wsum;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& t : mesh.triangles) {
        if (t.organ != Organ::Leaf) continue;
        double w = triangle_area(t);
        Vec3 c = triangle_centroid(t);
        double dx = c.x - mx, dy = c.y - my;
        sxx += w * dx * dx;
        sxy += w * dx * dy;
        syy += w * dy * dy;
    }
    double tr = sxx + syy;
    double disc = std::sqrt(std::max(0.0, (sxx - syy) * (sxx - syy) / 4.0 + sxy * sxy));
    double lmax = tr / 2.0 + disc;
    double lmin = tr / 2.0 - disc;
    if (lmax <= 0.0 || lmax < 1.05 * std::max(lmin, 0.0))
        throw Error("estimate_leaf_plane_azimuth: isotropic leaf scatter, axis ambiguous");
    // Largest-eigenvalue eigenvector of [[sxx, sxy], [sxy, syy]].
    double ex, ey;
    if (std::abs(sxy) > 1e-30) {
        ex = lmax - syy;
        ey = sxy;
    } else {
        ex = sxx >= syy ? 1.0 : 0.0;
        ey = sxx >= syy ? 0.0 : 1.0;
    }
    double a = std::atan2(ex, ey);  // compass azimuth of the axis direction
    a = std::fmod(std::fmod(a, kPi) + kPi, kPi);
    return a;
}

inline PlantModel generate_maize(const PlantParams& p) {
    p.validate();
    PlantModel plant;
    plantgen_detail::append_stem(plant.mesh, p);
    for (int i = 0; i < p.leaf_count; ++i) {
        double attach_z = p.height * (i + 1) / (p.leaf_count + 1);
        double jitter = p.phyllotaxy_noise_sd *
                        rng::gaussian(p.seed, rng::kPlantGen, 0, static_cast<std::uint32_t>(i), 0);
        double azimuth = p.phyllotaxy_base_azimuth + (i % 2 == 0 ? 0.0 : kPi) + jitter;
        plantgen_detail::append_leaf(plant.mesh, p, attach_z, azimuth);
    }
    plant.mesh.renumber();
    plant.base_anchor = {0.0, 0.0, 0.0};
    plant.total_leaf_area = plant.mesh.area(Organ::Leaf);
    // Record the blade-plane axis as the estimator sees it, so reorienting to
    // a target lands the estimate on the target; the nominal phyllotaxy
    // azimuth is the fallback when no axis is measurable.
    try {
        plant.leaf_plane_azimuth = estimate_leaf_plane_azimuth(plant.mesh);
        plant.leaf_axis_defined = true;
    } catch (const Error&) {
        plant.leaf_plane_azimuth = std::fmod(std::fmod(p.phyllotaxy_base_azimuth, kPi) + kPi, kPi);
        plant.leaf_axis_defined = false;
    }
    return plant;
}

// Yaw the plant about its base anchor so the leaf-plane axis lands on
// `target_azimuth` (mod pi).
inline PlantModel reorient(const PlantModel& plant, double target_azimuth) {
    if (!plant.leaf_axis_defined)
        throw Error("reorient: plant has no measurable leaf-plane azimuth");
    double target = std::fmod(std::fmod(target_azimuth, kPi) + kPi, kPi);
    // Counterclockwise yaw by psi shifts azimuths by -psi.
    double yaw = plant.leaf_plane_azimuth - target;
    PlantModel out;
    out.mesh = transform(plant.mesh, yaw, Vec3{}, plant.base_anchor);
    out.base_anchor = plant.base_anchor;
    out.total_leaf_area = plant.total_leaf_area;
    out.leaf_plane_azimuth = target;
    out.leaf_axis_defined = true;
    return out;
}

}  // namespace canopar
