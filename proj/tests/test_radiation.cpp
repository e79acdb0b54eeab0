#include <catch2/catch.hpp>

#include <array>

#include "canopar/radiation.hpp"
#include "support/oracles.hpp"

using namespace canopar;

namespace {

SolarState zenith_sun(double dni, double diffuse = 0.0) {
    SolarState s;
    s.zenith = 0.0;
    s.azimuth = kPi;
    s.sun_up = true;
    s.direct_normal_par = dni;
    s.diffuse_horizontal_par = diffuse;
    return s;
}

SolarState sky_only(double diffuse) {
    SolarState s = zenith_sun(0.0, diffuse);
    return s;
}

// Axis-aligned horizontal quad, +z normal, assigned to one plant.
void add_plate(Mesh& mesh, double x0, double y0, double x1, double y1, double z, int plant_id,
               Organ organ = Organ::Leaf) {
    Triangle a, b;
    a.v0 = {x0, y0, z}; a.v1 = {x1, y0, z}; a.v2 = {x1, y1, z};
    b.v0 = {x0, y0, z}; b.v1 = {x1, y1, z}; b.v2 = {x0, y1, z};
    a.organ = b.organ = organ;
    a.plant_id = b.plant_id = plant_id;
    mesh.triangles.push_back(a);
    mesh.triangles.push_back(b);
    mesh.renumber();
}

double plant_power(const SceneField& scene, const FluxMap& flux, int plant_id) {
    return per_plant_interception(flux, scene).absorbed_power[plant_id];
}

}  // namespace

TEST_CASE("flat plate under zenith sun absorbs 0.8 DNI") {
    Mesh mesh;
    add_plate(mesh, 0, 0, 1, 1, 1.0, 0);
    SceneField scene = make_scene(mesh);
    RadiationConfig cfg;
    SolarState sun = zenith_sun(1000.0);
    FluxMap direct = compute_direct(scene, sun, cfg);
    CHECK(direct.incident_direct[0] == Approx(1000.0));
    CHECK(direct.incident_direct[1] == Approx(1000.0));
    CHECK(direct.absorbed[0] == Approx(800.0));
    FluxMap full = run_scattering(scene, direct, cfg);
    CHECK(plant_power(scene, full, 0) == Approx(800.0).epsilon(1e-9));
}

TEST_CASE("plate directly beneath an opaque plate is fully shaded") {
    Mesh mesh;
    add_plate(mesh, 0, 0, 1, 1, 2.0, 0);
    add_plate(mesh, 0, 0, 1, 1, 1.0, 1);
    SceneField scene = make_scene(mesh);
    RadiationConfig cfg;
    FluxMap direct = compute_direct(scene, zenith_sun(1000.0), cfg);
    CHECK(direct.incident_direct[2] == 0.0);
    CHECK(direct.incident_direct[3] == 0.0);
}

TEST_CASE("compute_direct refuses a set sun") {
    Mesh mesh;
    add_plate(mesh, 0, 0, 1, 1, 1.0, 0);
    SceneField scene = make_scene(mesh);
    SolarState night;
    night.sun_up = false;
    CHECK_THROWS_AS(compute_direct(scene, night, RadiationConfig{}), Error);
}

TEST_CASE("unoccluded plate sees the full isotropic sky") {
    Mesh mesh;
    add_plate(mesh, 0, 0, 1, 1, 1.0, 0);
    SceneField scene = make_scene(mesh);
    RadiationConfig cfg;
    cfg.diffuse_samples_per_primitive = 1024;
    FluxMap diffuse = compute_diffuse(scene, sky_only(300.0), cfg);
    CHECK(diffuse.incident_diffuse[0] == Approx(300.0).epsilon(0.02));
    CHECK(diffuse.incident_diffuse[1] == Approx(300.0).epsilon(0.02));
}

TEST_CASE("plate under an opaque dome sees no sky") {
    // Periodic cell fully covered by a plate above: the infinite tiling acts
    // as an opaque dome over the lower plate.
    Mesh mesh;
    add_plate(mesh, 0, 0, 1, 1, 2.0, 0);
    add_plate(mesh, 0.25, 0.25, 0.75, 0.75, 1.0, 1);
    SceneField scene = make_scene(mesh, PeriodicDomain{1.0, 1.0, Vec3{}});
    RadiationConfig cfg;
    cfg.diffuse_samples_per_primitive = 512;
    cfg.max_wraps = 64;
    FluxMap diffuse = compute_diffuse(scene, sky_only(300.0), cfg);
    CHECK(diffuse.incident_diffuse[2] == Approx(0.0).margin(0.5));
    CHECK(diffuse.incident_diffuse[3] == Approx(0.0).margin(0.5));
}

TEST_CASE("two-plate diffuse gap matches a high-sample self-oracle") {
    for (double gap : {0.1, 0.4}) {
        Mesh mesh;
        add_plate(mesh, 0, 0, 0.4, 0.4, 1.0, 0);
        add_plate(mesh, 0, 0, 0.4, 0.4, 1.0 + gap, 1);
        SceneField scene = make_scene(mesh);
        RadiationConfig cfg;
        cfg.diffuse_samples_per_primitive = 1 << 16;
        FluxMap coarse = compute_diffuse(scene, sky_only(300.0), cfg);
        cfg.diffuse_samples_per_primitive = 1 << 20;
        FluxMap fine = compute_diffuse(scene, sky_only(300.0), cfg);
        CHECK(coarse.incident_diffuse[0] ==
              Approx(fine.incident_diffuse[0]).epsilon(0.02));
    }
}

TEST_CASE("scattering with rho = tau = 0 changes nothing") {
    Mesh mesh = oracles::poisson_leaf_canopy(31, 1.0, 1.0, 0.08, 0.3, 0.9);
    oracles::add_ground_quad(mesh, 1.0, 1.0);
    SceneField scene = make_scene(mesh, PeriodicDomain{1.0, 1.0, Vec3{}});
    RadiationConfig cfg;
    cfg.leaf_reflectance = 0.0;
    cfg.leaf_transmittance = 0.0;
    cfg.direct_samples_per_primitive = 8;
    cfg.diffuse_samples_per_primitive = 8;
    FluxMap first = combine(compute_direct(scene, zenith_sun(1000.0, 200.0), cfg),
                            compute_diffuse(scene, zenith_sun(1000.0, 200.0), cfg));
    FluxMap after = run_scattering(scene, first, cfg);
    for (std::size_t p = 0; p < first.size(); ++p) {
        CHECK(after.incident_scattered[p] == 0.0);
        CHECK(after.absorbed[p] == Approx(after.incident_total(p)));
    }
    CHECK(after.escaped_power == 0.0);
    CHECK(after.residual_power == 0.0);
}

TEST_CASE("zero scattering iterations absorb 0.8 of first-pass incident") {
    Mesh mesh;
    add_plate(mesh, 0, 0, 1, 1, 1.0, 0);
    SceneField scene = make_scene(mesh);
    RadiationConfig cfg;
    cfg.scattering_iterations = 0;
    FluxMap first = compute_direct(scene, zenith_sun(1000.0), cfg);
    FluxMap after = run_scattering(scene, first, cfg);
    CHECK(after.absorbed[0] == Approx(0.8 * first.incident_direct[0]));
    // The re-emittable share (0.2 of the 1000 umol/s plate power) is the
    // residual when no iterations run.
    CHECK(after.residual_power == Approx(200.0).epsilon(1e-9));
}

TEST_CASE("two infinite plates match the geometric-series radiosity ledger") {
    const double I0 = 1000.0;
    const double rho = 0.1, tau = 0.1;
    const int K = 5;

    Mesh mesh;
    add_plate(mesh, 0, 0, 1, 1, 1.0, 0);   // top plate
    add_plate(mesh, 0, 0, 1, 1, 0.5, 1);   // lower plate
    oracles::add_ground_quad(mesh, 1.0, 1.0);
    SceneField scene = make_scene(mesh, PeriodicDomain{1.0, 1.0, Vec3{}});

    RadiationConfig cfg;
    cfg.scattering_iterations = K;
    cfg.direct_samples_per_primitive = 32;
    cfg.scatter_samples_per_primitive = 2048;
    cfg.max_wraps = 64;

    FluxMap direct = compute_direct(scene, zenith_sun(I0), cfg);
    FluxMap full = run_scattering(scene, direct, cfg);
    PlantInterception plants = per_plant_interception(full, scene);

    // Exact per-face exchange between infinite layers (view factors are 1):
    // faces u1/d1 (top plate), u2/d2 (lower plate), g (ground, absorbs all).
    enum { U1, D1, U2, D2, G, NFACES };
    std::array<double, NFACES> inc{}, tot{};
    inc[U1] = I0;
    tot[U1] = I0;
    double escaped = 0.0;
    for (int k = 0; k < K; ++k) {
        std::array<double, NFACES> next{};
        escaped += rho * inc[U1] + tau * inc[D1];
        next[U2] = rho * inc[D1] + tau * inc[U1];
        next[D1] = rho * inc[U2] + tau * inc[D2];
        next[G] = rho * inc[D2] + tau * inc[U2];
        next[D2] = 0.0;  // ground reflectance is 0
        inc = next;
        for (int f = 0; f < NFACES; ++f) tot[f] += next[f];
    }
    double plate1_expected = (1.0 - rho - tau) * (tot[U1] + tot[D1]);
    double plate2_expected = (1.0 - rho - tau) * (tot[U2] + tot[D2]);
    double ground_expected = tot[G];
    double residual_expected = (rho + tau) * (inc[U1] + inc[D1] + inc[U2] + inc[D2]);

    double tol = std::max(std::pow(rho + tau, K), 0.01);
    CHECK(plants.absorbed_power[0] == Approx(plate1_expected).epsilon(tol));
    CHECK(plants.absorbed_power[1] == Approx(plate2_expected).epsilon(tol));
    CHECK(plants.ground_power == Approx(ground_expected).epsilon(tol));
    CHECK(full.escaped_power == Approx(escaped).epsilon(tol));
    CHECK(full.residual_power <= std::pow(rho + tau, K) * I0 + 0.005 * I0);
    CHECK(full.residual_power >= residual_expected * 0.5);  // wrap losses only add
}

TEST_CASE("direct energy audit: canopy + ground equals incident") {
    for (int trial = 0; trial < 3; ++trial) {
        Mesh mesh = oracles::poisson_leaf_canopy(100 + trial, 1.0 + 0.5 * trial, 1.0, 0.06, 0.2, 0.9);
        oracles::add_ground_quad(mesh, 1.0, 1.0);
        SceneField scene = make_scene(mesh, PeriodicDomain{1.0, 1.0, Vec3{}});
        RadiationConfig cfg;
        cfg.leaf_reflectance = 0.0;
        cfg.leaf_transmittance = 0.0;
        cfg.direct_samples_per_primitive = 16;
        double zen = 0.3 + 0.1 * trial;
        SolarState sun;
        sun.zenith = zen;
        sun.azimuth = 2.1;
        sun.sun_up = true;
        sun.direct_normal_par = 1000.0;
        FluxMap direct = compute_direct(scene, sun, cfg);
        FluxMap full = run_scattering(scene, direct, cfg);
        PlantInterception p = per_plant_interception(full, scene);
        double incident = 1000.0 * std::cos(zen) * 1.0;
        CHECK(p.canopy_power + p.ground_power == Approx(incident).epsilon(0.01));
    }
}

TEST_CASE("empty field sensors read zero interception") {
    Mesh mesh;
    oracles::add_ground_quad(mesh, 1.0, 1.0);
    SceneField scene = make_scene(mesh, PeriodicDomain{1.0, 1.0, Vec3{}});
    RadiationConfig cfg;
    SolarState sun = zenith_sun(1000.0, 200.0);
    FluxMap flux = solve_radiation(scene, sun, cfg);
    auto sensors = default_sensors(scene);
    SensorReading r = read_sensors(scene, sun, flux, sensors, cfg);
    REQUIRE(r.fraction_intercepted);
    CHECK(*r.fraction_intercepted == Approx(0.0).margin(1e-9));
    CHECK(r.above_mean == Approx(1200.0).epsilon(1e-6));
}

TEST_CASE("opaque slab over the line sensor intercepts everything") {
    Mesh mesh;
    add_plate(mesh, 0, 0, 1, 1, 1.0, 0);
    oracles::add_ground_quad(mesh, 1.0, 1.0);
    SceneField scene = make_scene(mesh, PeriodicDomain{1.0, 1.0, Vec3{}});
    RadiationConfig cfg;
    cfg.leaf_reflectance = 0.0;
    cfg.leaf_transmittance = 0.0;
    cfg.max_wraps = 32;
    SolarState sun = zenith_sun(1000.0, 200.0);
    FluxMap flux = solve_radiation(scene, sun, cfg);
    SensorReading r = read_sensors(scene, sun, flux, default_sensors(scene), cfg);
    REQUIRE(r.fraction_intercepted);
    CHECK(*r.fraction_intercepted == Approx(1.0).margin(0.01));
}

TEST_CASE("adding geometry never increases ground direct flux") {
    RadiationConfig cfg;
    cfg.leaf_reflectance = 0.0;
    cfg.leaf_transmittance = 0.0;
    SolarState sun;
    sun.zenith = 0.5;
    sun.azimuth = 3.0;
    sun.sun_up = true;
    sun.direct_normal_par = 1000.0;

    double previous = 1e30;
    for (double lai : {0.5, 1.0, 2.0}) {
        Mesh mesh = oracles::poisson_leaf_canopy(7, lai, 1.0, 0.06, 0.2, 0.9);
        oracles::add_ground_quad(mesh, 1.0, 1.0);
        SceneField scene = make_scene(mesh, PeriodicDomain{1.0, 1.0, Vec3{}});
        FluxMap flux = solve_radiation(scene, sun, cfg);
        SensorReading r = read_sensors(scene, sun, flux, default_sensors(scene), cfg);
        double ground = r.ground_mean;
        CHECK(ground <= previous + 1e-9);  // same seed: leaves are a superset
        previous = ground;
    }
}

TEST_CASE("fraction pre-clamp stays within Monte Carlo noise of [0,1]") {
    for (int trial = 0; trial < 3; ++trial) {
        Mesh mesh = oracles::poisson_leaf_canopy(50 + trial, 1.5, 1.0, 0.08, 0.2, 0.8);
        oracles::add_ground_quad(mesh, 1.0, 1.0);
        SceneField scene = make_scene(mesh, PeriodicDomain{1.0, 1.0, Vec3{}});
        RadiationConfig cfg;
        SolarState sun = zenith_sun(1500.0, 250.0);
        FluxMap flux = solve_radiation(scene, sun, cfg);
        SensorReading r = read_sensors(scene, sun, flux, default_sensors(scene), cfg);
        CHECK(r.fraction_raw > -0.02);
        CHECK(r.fraction_raw < 1.02);
        REQUIRE(r.fraction_intercepted);
        CHECK(*r.fraction_intercepted >= 0.0);
        CHECK(*r.fraction_intercepted <= 1.0);
    }
}

TEST_CASE("two plants at symmetric positions absorb equally") {
    Mesh mesh;
    add_plate(mesh, 0.1, 0.4, 0.3, 0.6, 0.5, 0);
    add_plate(mesh, 0.7, 0.4, 0.9, 0.6, 0.5, 1);
    oracles::add_ground_quad(mesh, 1.0, 1.0);
    SceneField scene = make_scene(mesh, PeriodicDomain{1.0, 1.0, Vec3{}});
    RadiationConfig cfg;
    FluxMap flux = solve_radiation(scene, zenith_sun(1000.0, 100.0), cfg);
    PlantInterception p = per_plant_interception(flux, scene);
    CHECK(p.absorbed_power[0] == Approx(p.absorbed_power[1]).epsilon(0.02));
}

TEST_CASE("flux map is identical across worker counts") {
    Mesh mesh = oracles::poisson_leaf_canopy(9, 1.0, 1.0, 0.08, 0.3, 0.9);
    oracles::add_ground_quad(mesh, 1.0, 1.0);
    SceneField scene = make_scene(mesh, PeriodicDomain{1.0, 1.0, Vec3{}});
    RadiationConfig cfg;
    cfg.direct_samples_per_primitive = 8;
    cfg.diffuse_samples_per_primitive = 16;
    cfg.scatter_samples_per_primitive = 8;
    SolarState sun = zenith_sun(1000.0, 200.0);

    set_thread_count(1);
    FluxMap one = solve_radiation(scene, sun, cfg);
    set_thread_count(4);
    FluxMap four = solve_radiation(scene, sun, cfg);
    set_thread_count(0);
    REQUIRE(one.size() == four.size());
    for (std::size_t p = 0; p < one.size(); ++p) {
        REQUIRE(one.incident_direct[p] == four.incident_direct[p]);
        REQUIRE(one.incident_diffuse[p] == four.incident_diffuse[p]);
        REQUIRE(one.incident_scattered[p] == four.incident_scattered[p]);
        REQUIRE(one.absorbed[p] == four.absorbed[p]);
    }
    CHECK(one.escaped_power == four.escaped_power);
    CHECK(one.residual_power == four.residual_power);

    cfg.rng_seed = 2;
    set_thread_count(0);
    FluxMap reseeded = solve_radiation(scene, sun, cfg);
    bool differs = false;
    for (std::size_t p = 0; p < one.size() && !differs; ++p)
        differs = one.incident_direct[p] != reseeded.incident_direct[p];
    CHECK(differs);
}

TEST_CASE("point sensors below the canopy top are rejected") {
    Mesh mesh;
    add_plate(mesh, 0, 0, 1, 1, 1.0, 0);
    oracles::add_ground_quad(mesh, 1.0, 1.0, 2);
    SceneField scene = make_scene(mesh, PeriodicDomain{1.0, 1.0, Vec3{}});
    RadiationConfig cfg;
    SolarState sun = zenith_sun(1000.0, 100.0);
    FluxMap flux = solve_radiation(scene, sun, cfg);
    std::vector<SensorSpec> bad = {SensorSpec::point_above({0.5, 0.5, 0.5}),
                                   SensorSpec::line_ground({0, 0.5, 0.05}, {1, 0.5, 0.05})};
    CHECK_THROWS_AS(read_sensors(scene, sun, flux, bad, cfg), Error);
}

TEST_CASE("configuration invariants are enforced") {
    RadiationConfig cfg;
    cfg.leaf_reflectance = 0.6;
    cfg.leaf_transmittance = 0.5;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = RadiationConfig{};
    cfg.scattering_iterations = -1;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = RadiationConfig{};
    cfg.direct_samples_per_primitive = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("per-plant interception flags unknown plant ids") {
    Mesh mesh;
    add_plate(mesh, 0, 0, 1, 1, 1.0, 5);  // id 5 but only one plant position
    SceneField scene = make_scene(mesh);
    RadiationConfig cfg;
    FluxMap flux = compute_direct(scene, zenith_sun(1000.0), cfg);
    // make_scene saw max plant id 5 and allocated positions 0..5, so this is fine;
    // truncate the positions to force the error path.
    scene.plant_positions.resize(2);
    CHECK_THROWS_AS(per_plant_interception(flux, scene), Error);
}
