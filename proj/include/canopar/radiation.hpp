#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "canopar/field.hpp"
#include "canopar/parallel.hpp"
#include "canopar/rng.hpp"
#include "canopar/solar.hpp"

namespace canopar {

// Reverse ray tracing: rays start on receiving surfaces and are traced toward
// the sun (direct), the sky dome (diffuse), or across the canopy (scattering
// iterations). The first pass treats all surfaces as opaque; transmission is
// carried exclusively by the scattering iterations' transmitted lobe, so the
// (1 - rho - tau) absorption factor is applied to the total incident flux
// without double counting.
struct RadiationConfig {
    double leaf_reflectance = 0.1;
    double leaf_transmittance = 0.1;
    double stem_reflectance = -1.0;   // < 0: use leaf value
    double stem_transmittance = -1.0; // < 0: use leaf value
    double ground_reflectance = 0.0;
    int scattering_iterations = 5;
    int direct_samples_per_primitive = 16;
    int diffuse_samples_per_primitive = 64;
    int scatter_samples_per_primitive = 32;
    int max_wraps = 4;
    std::uint64_t rng_seed = 1;

    double organ_reflectance(Organ o) const {
        switch (o) {
            case Organ::Stem: return stem_reflectance >= 0.0 ? stem_reflectance : leaf_reflectance;
            case Organ::Ground: return ground_reflectance;
            default: return leaf_reflectance;
        }
    }
    double organ_transmittance(Organ o) const {
        switch (o) {
            case Organ::Stem: return stem_transmittance >= 0.0 ? stem_transmittance : leaf_transmittance;
            case Organ::Ground: return 0.0;
            default: return leaf_transmittance;
        }
    }

    void validate() const {
        auto check_pair = [](double r, double t, const char* what) {
            if (r < 0.0 || t < 0.0 || r + t >= 1.0)
                throw Error(std::string("radiation: ") + what +
                            " reflectance/transmittance must satisfy rho >= 0, tau >= 0, rho + tau < 1");
        };
        check_pair(leaf_reflectance, leaf_transmittance, "leaf");
        if (stem_reflectance >= 0.0 || stem_transmittance >= 0.0)
            check_pair(stem_reflectance >= 0.0 ? stem_reflectance : leaf_reflectance,
                       stem_transmittance >= 0.0 ? stem_transmittance : leaf_transmittance, "stem");
        if (ground_reflectance < 0.0 || ground_reflectance >= 1.0)
            throw Error("radiation: ground_reflectance must be in [0, 1)");
        if (scattering_iterations < 0) throw Error("radiation: scattering_iterations must be >= 0");
        if (direct_samples_per_primitive < 1 || diffuse_samples_per_primitive < 1 ||
            scatter_samples_per_primitive < 1)
            throw Error("radiation: sample counts must be >= 1");
        if (max_wraps < 0) throw Error("radiation: max_wraps must be >= 0");
    }
};

// Per-primitive flux in umol m^-2 s^-1 (both faces summed), plus the
// face-resolved totals the scattering solver and virtual sensors need.
struct FluxMap {
    std::vector<double> incident_direct;
    std::vector<double> incident_diffuse;
    std::vector<double> incident_scattered;
    std::vector<double> incident_front;  // all passes, +normal side
    std::vector<double> incident_back;   // all passes, -normal side
    std::vector<double> absorbed;
    double escaped_power = 0.0;   // umol s^-1, scattered power lost upward to the sky
    double residual_power = 0.0;  // umol s^-1, unresolved after the last iteration

    void resize(std::size_t n) {
        incident_direct.assign(n, 0.0);
        incident_diffuse.assign(n, 0.0);
        incident_scattered.assign(n, 0.0);
        incident_front.assign(n, 0.0);
        incident_back.assign(n, 0.0);
        absorbed.assign(n, 0.0);
        escaped_power = residual_power = 0.0;
    }

    std::size_t size() const { return incident_direct.size(); }

    double incident_total(std::size_t p) const {
        return incident_direct[p] + incident_diffuse[p] + incident_scattered[p];
    }
};

namespace radiation_detail {

inline Vec3 sample_triangle_point(const Triangle& t, double u1, double u2) {
    double su = std::sqrt(u1);
    double b0 = 1.0 - su;
    double b1 = u2 * su;
    return t.v0 * b0 + t.v1 * b1 + t.v2 * (1.0 - b0 - b1);
}

// Orthonormal basis around unit vector n (Frisvad style, branch at the pole).
inline void basis(const Vec3& n, Vec3& t, Vec3& b) {
    if (n.z < -0.9999999) {
        t = {0.0, -1.0, 0.0};
        b = {-1.0, 0.0, 0.0};
        return;
    }
    double a = 1.0 / (1.0 + n.z);
    double xy = -n.x * n.y * a;
    t = {1.0 - n.x * n.x * a, xy, -n.x};
    b = {xy, 1.0 - n.y * n.y * a, -n.y};
}

inline Vec3 cosine_direction(const Vec3& n, double u1, double u2) {
    double sin_theta = std::sqrt(u1);
    double cos_theta = std::sqrt(std::max(0.0, 1.0 - u1));
    double phi = 2.0 * kPi * u2;
    Vec3 t, b;
    basis(n, t, b);
    return normalized(t * (sin_theta * std::cos(phi)) + b * (sin_theta * std::sin(phi)) +
                      n * cos_theta);
}

inline Vec3 scene_sun_direction(const SceneField& scene, const SolarState& sun) {
    double az_scene = sun.azimuth - scene.scene_yaw;
    double sz = std::sin(sun.zenith);
    return {sz * std::sin(az_scene), sz * std::cos(az_scene), std::cos(sun.zenith)};
}

inline void finalize_absorbed(const SceneField& scene, const RadiationConfig& cfg, FluxMap& flux) {
    for (std::size_t p = 0; p < flux.size(); ++p) {
        Organ o = scene.mesh.triangles[p].organ;
        flux.absorbed[p] =
            flux.incident_total(p) * (1.0 - cfg.organ_reflectance(o) - cfg.organ_transmittance(o));
    }
}

}  // namespace radiation_detail

// First-pass beam interception: per primitive, area-stratified sample points
// cast shadow rays toward the sun (periodic wrapping applies); the incident
// flux is DNI * |cos(incidence)| * unoccluded fraction. Surfaces are treated
// as opaque occluders here.
inline FluxMap compute_direct(const SceneField& scene, const SolarState& sun,
                              const RadiationConfig& cfg) {
    cfg.validate();
    if (!sun.sun_up) throw Error("compute_direct: sun below horizon");
    const Vec3 sun_dir = radiation_detail::scene_sun_direction(scene, sun);
    const double dni = sun.direct_normal_par;
    const auto& tris = scene.mesh.triangles;
    FluxMap flux;
    flux.resize(tris.size());
    const int n_samples = cfg.direct_samples_per_primitive;

    parallel_for(tris.size(), [&](std::size_t p) {
        const Triangle& tri = tris[p];
        const Vec3 n = triangle_normal(tri);
        const double cos_inc = dot(n, sun_dir);
        if (std::abs(cos_inc) < 1e-12 || dni <= 0.0) return;
        const Vec3 offset = n * (cos_inc > 0.0 ? kRayOffsetEps : -kRayOffsetEps);
        int unoccluded = 0;
        for (int s = 0; s < n_samples; ++s) {
            rng::Quad q = rng::uniform4(cfg.rng_seed, rng::kDirect, 0,
                                        static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(s));
            double u1 = (s + q.u0) / n_samples;  // stratified over area
            Vec3 point = radiation_detail::sample_triangle_point(tri, u1, q.u1);
            Ray ray{point + offset, sun_dir, 0.0, std::numeric_limits<double>::infinity()};
            if (!occluded(scene.bvh, tris, ray, scene.domain, cfg.max_wraps)) ++unoccluded;
        }
        double f = dni * std::abs(cos_inc) * unoccluded / n_samples;
        flux.incident_direct[p] = f;
        (cos_inc > 0.0 ? flux.incident_front : flux.incident_back)[p] += f;
    });
    radiation_detail::finalize_absorbed(scene, cfg, flux);
    return flux;
}

// First-pass sky diffuse: cosine-weighted hemisphere rays from both faces
// (upward face only for ground); rays that reach the sky unobstructed see an
// isotropic dome of radiance D / pi, so an unoccluded horizontal surface
// integrates to exactly the diffuse horizontal flux D.
inline FluxMap compute_diffuse(const SceneField& scene, const SolarState& sun,
                               const RadiationConfig& cfg) {
    cfg.validate();
    if (sun.diffuse_horizontal_par < 0.0) throw Error("compute_diffuse: negative diffuse flux");
    const double dhp = sun.diffuse_horizontal_par;
    const auto& tris = scene.mesh.triangles;
    FluxMap flux;
    flux.resize(tris.size());
    if (dhp <= 0.0) {
        radiation_detail::finalize_absorbed(scene, cfg, flux);
        return flux;
    }
    const int per_face = std::max(1, cfg.diffuse_samples_per_primitive / 2);

    parallel_for(tris.size(), [&](std::size_t p) {
        const Triangle& tri = tris[p];
        const Vec3 n = triangle_normal(tri);
        const int faces = tri.organ == Organ::Ground ? 1 : 2;
        for (int face = 0; face < faces; ++face) {
            const Vec3 nf = face == 0 ? n : -n;
            int sky = 0;
            for (int s = 0; s < per_face; ++s) {
                rng::Quad q = rng::uniform4(cfg.rng_seed, rng::kDiffuse, static_cast<std::uint32_t>(face),
                                            static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(s));
                Vec3 point = radiation_detail::sample_triangle_point(tri, q.u0, q.u1);
                double u_dir = (s + q.u2) / per_face;  // stratified over the cosine lobe
                Vec3 dir = radiation_detail::cosine_direction(nf, u_dir, q.u3);
                if (dir.z <= 0.0) continue;  // sky is up; downward rays see no dome
                Ray ray{point + nf * kRayOffsetEps, dir, 0.0, std::numeric_limits<double>::infinity()};
                if (!occluded(scene.bvh, tris, ray, scene.domain, cfg.max_wraps)) ++sky;
            }
            double f = dhp * static_cast<double>(sky) / per_face;
            flux.incident_diffuse[p] += f;
            (face == 0 ? flux.incident_front : flux.incident_back)[p] += f;
        }
    });
    radiation_detail::finalize_absorbed(scene, cfg, flux);
    return flux;
}

inline FluxMap combine(const FluxMap& a, const FluxMap& b) {
    if (a.size() != b.size()) throw Error("FluxMap combine: size mismatch");
    FluxMap out = a;
    for (std::size_t p = 0; p < out.size(); ++p) {
        out.incident_direct[p] += b.incident_direct[p];
        out.incident_diffuse[p] += b.incident_diffuse[p];
        out.incident_scattered[p] += b.incident_scattered[p];
        out.incident_front[p] += b.incident_front[p];
        out.incident_back[p] += b.incident_back[p];
        out.absorbed[p] += b.absorbed[p];
    }
    out.escaped_power += b.escaped_power;
    out.residual_power += b.residual_power;
    return out;
}

// Iterative scattering. Each iteration re-emits the unabsorbed share of the
// power received in the previous one: rho leaves from the incident face, tau
// from the opposite face, both Lambertian. Power still pending after the last
// iteration (its re-emittable share) plus any rays lost to the wrap budget is
// reported as residual, so incident = absorbed + escaped + residual holds to
// within Monte Carlo noise of the first-pass estimate.
inline FluxMap run_scattering(const SceneField& scene, const FluxMap& first_pass,
                              const RadiationConfig& cfg) {
    cfg.validate();
    const auto& tris = scene.mesh.triangles;
    const std::size_t P = tris.size();
    if (first_pass.size() != P) throw Error("run_scattering: flux map size mismatch");
    FluxMap flux = first_pass;

    std::vector<double> area(P);
    for (std::size_t p = 0; p < P; ++p) area[p] = triangle_area(tris[p]);

    // Pending power per face, from the first pass.
    std::vector<double> pend[2];
    pend[0].resize(P);
    pend[1].resize(P);
    for (std::size_t p = 0; p < P; ++p) {
        pend[0][p] = first_pass.incident_front[p] * area[p];
        pend[1][p] = first_pass.incident_back[p] * area[p];
    }

    std::vector<double> scat_power[2];
    scat_power[0].assign(P, 0.0);
    scat_power[1].assign(P, 0.0);
    double escaped = 0.0, lost = 0.0;

    const int S = cfg.scatter_samples_per_primitive;
    struct Emission {
        std::vector<std::pair<std::uint32_t, double>> deposits;  // (prim * 2 + face, power)
        double escaped = 0.0;
        double lost = 0.0;
    };

    const std::size_t kChunk = 4096;
    std::vector<Emission> buffer(std::min(kChunk, 2 * P));

    for (int iter = 1; iter <= cfg.scattering_iterations; ++iter) {
        std::vector<double> next[2];
        next[0].assign(P, 0.0);
        next[1].assign(P, 0.0);
        for (std::size_t chunk_start = 0; chunk_start < 2 * P; chunk_start += kChunk) {
            const std::size_t chunk_len = std::min(kChunk, 2 * P - chunk_start);
            parallel_for(chunk_len, [&](std::size_t k) {
                Emission& em = buffer[k];
                em.deposits.clear();
                em.escaped = em.lost = 0.0;
                const std::size_t slot = chunk_start + k;
                const std::size_t p = slot / 2;
                const int face = static_cast<int>(slot % 2);
                const Triangle& tri = tris[p];
                const double rho = cfg.organ_reflectance(tri.organ);
                const double tau = cfg.organ_transmittance(tri.organ);
                const double emit_power = rho * pend[face][p] + tau * pend[1 - face][p];
                if (emit_power <= 0.0) return;
                const Vec3 n = triangle_normal(tri);
                const Vec3 nf = face == 0 ? n : -n;
                const double per_ray = emit_power / S;
                for (int s = 0; s < S; ++s) {
                    rng::Quad q = rng::uniform4(
                        cfg.rng_seed, rng::kScatter,
                        static_cast<std::uint32_t>(iter * 2 + face),
                        static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(s));
                    Vec3 point = radiation_detail::sample_triangle_point(tri, q.u0, q.u1);
                    double u_dir = (s + q.u2) / S;
                    Vec3 dir = radiation_detail::cosine_direction(nf, u_dir, q.u3);
                    Ray ray{point + nf * kRayOffsetEps, dir, 0.0,
                            std::numeric_limits<double>::infinity()};
                    auto hit = intersect(scene.bvh, tris, ray, scene.domain, cfg.max_wraps);
                    if (hit) {
                        std::uint32_t rslot = hit->primitive_id * 2 + (hit->entering_front_face ? 0 : 1);
                        em.deposits.emplace_back(rslot, per_ray);
                    } else if (dir.z > 0.0) {
                        em.escaped += per_ray;
                    } else {
                        em.lost += per_ray;
                    }
                }
            });
            // Serial merge in slot order keeps results independent of thread count.
            for (std::size_t k = 0; k < chunk_len; ++k) {
                const Emission& em = buffer[k];
                for (const auto& [rslot, power] : em.deposits) {
                    next[rslot % 2][rslot / 2] += power;
                    scat_power[rslot % 2][rslot / 2] += power;
                }
                escaped += em.escaped;
                lost += em.lost;
            }
        }
        pend[0].swap(next[0]);
        pend[1].swap(next[1]);
    }

    double residual = lost;
    for (std::size_t p = 0; p < P; ++p) {
        const double rho = cfg.organ_reflectance(tris[p].organ);
        const double tau = cfg.organ_transmittance(tris[p].organ);
        residual += (pend[0][p] + pend[1][p]) * (rho + tau);
    }

    for (std::size_t p = 0; p < P; ++p) {
        flux.incident_scattered[p] = (scat_power[0][p] + scat_power[1][p]) / area[p];
        flux.incident_front[p] += scat_power[0][p] / area[p];
        flux.incident_back[p] += scat_power[1][p] / area[p];
    }
    flux.escaped_power += escaped;
    flux.residual_power += residual;
    radiation_detail::finalize_absorbed(scene, cfg, flux);
    return flux;
}

// Convenience: direct + diffuse + scattering.
inline FluxMap solve_radiation(const SceneField& scene, const SolarState& sun,
                               const RadiationConfig& cfg) {
    FluxMap direct = compute_direct(scene, sun, cfg);
    FluxMap diffuse = compute_diffuse(scene, sun, cfg);
    return run_scattering(scene, combine(direct, diffuse), cfg);
}

// Virtual PAR sensors. Point sensors emulate upward-facing quantum sensors
// held above the canopy; the line sensor emulates a ground-level line quantum
// sensor laid between rows, averaged over its sample points.
struct SensorSpec {
    enum class Kind { PointAbove, LineGround };
    Kind kind = Kind::PointAbove;
    Vec3 a{};           // position (PointAbove) or segment start (LineGround)
    Vec3 b{};           // segment end (LineGround)
    int line_samples = 50;

    static SensorSpec point_above(const Vec3& pos) { return {Kind::PointAbove, pos, {}, 0}; }
    static SensorSpec line_ground(const Vec3& a, const Vec3& b, int samples = 50) {
        return {Kind::LineGround, a, b, samples};
    }
};

struct SensorReading {
    std::vector<double> par_flux;            // one entry per sensor, umol m^-2 s^-1
    double above_mean = 0.0;
    double ground_mean = 0.0;
    std::optional<double> fraction_intercepted;  // missing when above-canopy flux is 0
    double fraction_raw = 0.0;                   // before clamping to [0, 1]
};

// Default placement: two point sensors ~1.27 m above the canopy top and one
// ground line at 0.05 m height running along the rows, centered between a row
// and its neighbor (the periodic image for single-row fields).
inline std::vector<SensorSpec> default_sensors(const SceneField& scene) {
    double x_extent, y_extent;
    if (scene.domain) {
        x_extent = scene.domain->x_extent;
        y_extent = scene.domain->y_extent;
    } else {
        Aabb b = scene.mesh.bounds();
        x_extent = b.hi.x - b.lo.x;
        y_extent = b.hi.y - b.lo.y;
    }
    double z_above = scene.canopy_top + 1.27;
    double y_line = PeriodicDomain::wrap_coord(scene.layout.row_spacing * 0.5, y_extent);
    if (!(y_line > 0.0) || y_line >= y_extent) y_line = 0.5 * y_extent;
    std::vector<SensorSpec> sensors;
    sensors.push_back(SensorSpec::point_above({0.3 * x_extent, 0.45 * y_extent, z_above}));
    sensors.push_back(SensorSpec::point_above({0.7 * x_extent, 0.55 * y_extent, z_above}));
    sensors.push_back(SensorSpec::line_ground({0.0, y_line, 0.05}, {x_extent, y_line, 0.05}));
    return sensors;
}

namespace radiation_detail {

inline double sensor_point_flux(const SceneField& scene, const SolarState& sun,
                                const FluxMap& flux, const RadiationConfig& cfg,
                                const Vec3& point, std::uint32_t stream_entity) {
    const auto& tris = scene.mesh.triangles;
    double value = 0.0;
    if (sun.sun_up && sun.direct_normal_par > 0.0) {
        Vec3 sun_dir = scene_sun_direction(scene, sun);
        Ray ray{point + Vec3{0.0, 0.0, kRayOffsetEps}, sun_dir, 0.0,
                std::numeric_limits<double>::infinity()};
        if (!occluded(scene.bvh, tris, ray, scene.domain, cfg.max_wraps))
            value += sun.direct_normal_par * std::cos(sun.zenith);
    }
    const int n = cfg.diffuse_samples_per_primitive;
    const Vec3 up{0.0, 0.0, 1.0};
    double hemi = 0.0;
    for (int s = 0; s < n; ++s) {
        rng::Quad q = rng::uniform4(cfg.rng_seed, rng::kSensor, 0, stream_entity,
                                    static_cast<std::uint32_t>(s));
        double u_dir = (s + q.u0) / n;
        Vec3 dir = cosine_direction(up, u_dir, q.u1);
        Ray ray{point + Vec3{0.0, 0.0, kRayOffsetEps}, dir, 0.0,
                std::numeric_limits<double>::infinity()};
        auto hit = intersect(scene.bvh, tris, ray, scene.domain, cfg.max_wraps);
        if (!hit) {
            hemi += sun.diffuse_horizontal_par;
            continue;
        }
        // Radiosity of the face we see: reflected share of that face's
        // incident flux plus the share transmitted through from the far face.
        const Triangle& tri = tris[hit->primitive_id];
        double rho = cfg.organ_reflectance(tri.organ);
        double tau = cfg.organ_transmittance(tri.organ);
        double inc_near = hit->entering_front_face ? flux.incident_front[hit->primitive_id]
                                                   : flux.incident_back[hit->primitive_id];
        double inc_far = hit->entering_front_face ? flux.incident_back[hit->primitive_id]
                                                  : flux.incident_front[hit->primitive_id];
        hemi += rho * inc_near + tau * inc_far;
    }
    return value + hemi / n;
}

}  // namespace radiation_detail

inline SensorReading read_sensors(const SceneField& scene, const SolarState& sun,
                                  const FluxMap& flux, const std::vector<SensorSpec>& sensors,
                                  const RadiationConfig& cfg) {
    cfg.validate();
    if (flux.size() != scene.mesh.size()) throw Error("read_sensors: flux map size mismatch");
    for (const SensorSpec& s : sensors)
        if (s.kind == SensorSpec::Kind::PointAbove && s.a.z <= scene.canopy_top)
            throw Error("read_sensors: point sensor must sit above the canopy top");
    SensorReading reading;
    reading.par_flux.resize(sensors.size(), 0.0);
    double above_sum = 0.0, ground_sum = 0.0;
    int above_n = 0, ground_n = 0;

    parallel_for(sensors.size(), [&](std::size_t i) {
        const SensorSpec& s = sensors[i];
        if (s.kind == SensorSpec::Kind::PointAbove) {
            reading.par_flux[i] = radiation_detail::sensor_point_flux(
                scene, sun, flux, cfg, s.a, static_cast<std::uint32_t>(i) << 16);
        } else {
            const int n = std::max(1, s.line_samples);
            double sum = 0.0;
            for (int k = 0; k < n; ++k) {
                Vec3 point = s.a + (s.b - s.a) * ((k + 0.5) / n);
                sum += radiation_detail::sensor_point_flux(
                    scene, sun, flux, cfg, point,
                    (static_cast<std::uint32_t>(i) << 16) | static_cast<std::uint32_t>(k + 1));
            }
            reading.par_flux[i] = sum / n;
        }
    });
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        if (sensors[i].kind == SensorSpec::Kind::PointAbove) {
            above_sum += reading.par_flux[i];
            ++above_n;
        } else {
            ground_sum += reading.par_flux[i];
            ++ground_n;
        }
    }
    if (above_n == 0 || ground_n == 0)
        throw Error("read_sensors: need at least one above-canopy and one ground sensor");
    reading.above_mean = above_sum / above_n;
    reading.ground_mean = ground_sum / ground_n;
    if (reading.above_mean > 0.0) {
        reading.fraction_raw = (reading.above_mean - reading.ground_mean) / reading.above_mean;
        reading.fraction_intercepted = std::clamp(reading.fraction_raw, 0.0, 1.0);
    }
    return reading;
}

// Absorbed power per plant (umol s^-1) and aggregates used by energy audits.
struct PlantInterception {
    std::vector<double> absorbed_power;  // indexed by plant_id
    double canopy_power = 0.0;
    double ground_power = 0.0;
    double per_ground_area = 0.0;  // canopy power / cell area, umol m^-2 s^-1
};

inline PlantInterception per_plant_interception(const FluxMap& flux, const SceneField& scene) {
    if (flux.size() != scene.mesh.size()) throw Error("per_plant_interception: size mismatch");
    PlantInterception out;
    out.absorbed_power.assign(std::max(scene.plant_count(), 0), 0.0);
    for (std::size_t p = 0; p < flux.size(); ++p) {
        const Triangle& tri = scene.mesh.triangles[p];
        double power = flux.absorbed[p] * triangle_area(tri);
        if (tri.organ == Organ::Ground) {
            out.ground_power += power;
            continue;
        }
        if (tri.plant_id < 0 || tri.plant_id >= scene.plant_count())
            throw Error("per_plant_interception: unknown plant_id " + std::to_string(tri.plant_id));
        out.absorbed_power[tri.plant_id] += power;
        out.canopy_power += power;
    }
    out.per_ground_area = out.canopy_power / scene.ground_area();
    return out;
}

}  // namespace canopar
