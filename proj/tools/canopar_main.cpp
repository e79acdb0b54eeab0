// canopar: PAR interception in virtual maize fields.
//
// Subcommands:
//   simulate      run a season over a configured field, write flux/daily/seasonal CSVs
//   sweep         Cartesian scenario sweep (spacings, orientations, row directions, locations)
//   gen-plant     write a procedural plant as PLY plus a JSON sidecar
//   validate      R^2 of simulated vs measured interception fractions
//   export-field  write the assembled field geometry as PLY

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "canopar/canopar.hpp"

namespace fs = std::filesystem;
using namespace canopar;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    int threads = -1;  // -1: unset
    std::string unit = "m";
};

void apply_seed_override(RunConfig& cfg, const std::optional<std::uint64_t>& seed) {
    if (!seed) return;
    cfg.seed = *seed;
    cfg.plant.seed = *seed;
    cfg.field.orientation_seed = *seed;
    cfg.radiation.rng_seed = *seed;
}

int resolve_threads(const CommonOptions& opt, const RunConfig* cfg) {
    if (opt.threads > 0) return opt.threads;
    if (cfg && cfg->threads > 0) return cfg->threads;
    if (const char* env = std::getenv("CANOPY_PAR_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 0;  // hardware concurrency
}

PlantModel load_or_generate_plant(const RunConfig& cfg) {
    if (cfg.plant_ply) {
        PlantModel plant;
        plant.mesh = load_ply(*cfg.plant_ply, cfg.ply_scale);
        plant.total_leaf_area = plant.mesh.area(Organ::Leaf);
        plant.leaf_plane_azimuth = estimate_leaf_plane_azimuth(plant.mesh);
        return plant;
    }
    return generate_maize(cfg.plant);
}

int cmd_simulate(const CommonOptions& opt) {
    RunConfig cfg = RunConfig::from_file(opt.config_path);
    apply_seed_override(cfg, opt.seed);
    set_thread_count(resolve_threads(opt, &cfg));
    fs::path out_dir = opt.out.empty() ? fs::path(cfg.output_dir) : fs::path(opt.out);
    fs::create_directories(out_dir);

    PlantModel plant = load_or_generate_plant(cfg);
    SceneField scene = build_field(cfg.field, plant);
    std::vector<SensorSpec> sensors = default_sensors(scene);

    SeasonalResult season = run_season(scene, cfg.schedule, cfg.radiation, sensors);

    TimePoint snapshot = cfg.flux_snapshot.value_or(TimePoint{cfg.schedule.date_start, {13, 0}});
    TimepointResult snap = run_timepoint(scene, cfg.schedule.location, cfg.sky, snapshot,
                                         cfg.radiation, sensors);

    write_flux_csv((out_dir / "flux.csv").string(), scene, snap.flux);
    write_daily_csv((out_dir / "daily.csv").string(), season);
    write_seasonal_csv((out_dir / "seasonal.csv").string(), season);
    write_sensors_csv((out_dir / "sensors.csv").string(), season);

    double mean_plant = 0.0;
    for (double v : season.season_per_plant_mol) mean_plant += v;
    if (!season.season_per_plant_mol.empty())
        mean_plant /= static_cast<double>(season.season_per_plant_mol.size());
    std::cout << "simulate: " << season.days.size() << " dates x "
              << (season.days.empty() ? 0 : season.days.front().times.size()) << " timepoints, "
              << scene.plant_count() << " plants; season PAR "
              << csv::number(season.season_per_ground_area_mol) << " mol/m^2, "
              << csv::number(mean_plant) << " mol/plant; outputs in " << out_dir.string() << "\n";
    return 0;
}

int cmd_sweep(const CommonOptions& opt) {
    RunConfig cfg = RunConfig::from_file(opt.config_path);
    apply_seed_override(cfg, opt.seed);
    set_thread_count(resolve_threads(opt, &cfg));
    fs::path out_dir = opt.out.empty() ? fs::path(cfg.output_dir) : fs::path(opt.out);
    fs::create_directories(out_dir);

    ScenarioSpec spec = cfg.to_scenario_spec();
    std::cout << "sweep: " << spec.scenario_count() << " scenarios\n";
    std::vector<SweepRow> rows = run_sweep(spec);
    write_sweep_csv((out_dir / "sweep.csv").string(), rows);
    std::size_t failed = 0;
    for (const auto& r : rows)
        if (r.status != "ok") ++failed;
    std::cout << "sweep: wrote " << rows.size() << " rows to " << (out_dir / "sweep.csv").string();
    if (failed) std::cout << " (" << failed << " failed scenario rows)";
    std::cout << "\n";
    return failed == 0 ? 0 : 1;
}

int cmd_gen_plant(const CommonOptions& opt) {
    RunConfig cfg;
    if (!opt.config_path.empty()) cfg = RunConfig::from_file(opt.config_path);
    apply_seed_override(cfg, opt.seed);
    std::string out = opt.out.empty() ? "plant.ply" : opt.out;
    double scale = convert_spacing(1.0, opt.unit);

    PlantModel plant = generate_maize(cfg.plant);
    save_ply(plant.mesh, out, /*binary=*/false, scale);

    nlohmann::json sidecar;
    sidecar["height_m"] = cfg.plant.height;
    sidecar["leaf_count"] = cfg.plant.leaf_count;
    sidecar["leaf_length_m"] = cfg.plant.leaf_length;
    sidecar["leaf_width_m"] = cfg.plant.leaf_width;
    sidecar["base_azimuth_deg"] = cfg.plant.phyllotaxy_base_azimuth * 180.0 / kPi;
    sidecar["azimuth_noise_sd_deg"] = cfg.plant.phyllotaxy_noise_sd * 180.0 / kPi;
    sidecar["leaf_inclination_deg"] = cfg.plant.leaf_inclination * 180.0 / kPi;
    sidecar["curvature"] = cfg.plant.curvature;
    sidecar["stem_radius_m"] = cfg.plant.stem_radius;
    sidecar["segments_per_leaf"] = cfg.plant.segments_per_leaf;
    sidecar["seed"] = cfg.plant.seed;
    sidecar["unit"] = opt.unit;
    sidecar["leaf_plane_azimuth_deg"] = plant.leaf_plane_azimuth * 180.0 / kPi;
    sidecar["total_leaf_area_m2"] = plant.total_leaf_area;
    sidecar["triangles"] = plant.mesh.size();
    std::ofstream meta(out + ".json");
    meta << sidecar.dump(2) << "\n";
    if (!meta) throw Error("gen-plant: cannot write sidecar for '" + out + "'");

    std::cout << "gen-plant: " << plant.mesh.size() << " triangles, leaf area "
              << csv::number(plant.total_leaf_area) << " m^2 -> " << out << "\n";
    return 0;
}

int cmd_validate(const CommonOptions& opt, const std::string& pairs_path) {
    auto records = load_validation_csv(pairs_path);
    double r2 = r_squared(records);
    std::cout << "records: " << records.size() << "\n";
    std::cout << "r_squared: " << csv::number(r2) << "\n";
    std::cout << "genotype,measured,simulated,residual\n";
    for (const auto& r : records)
        std::cout << csv::escape(r.genotype) << "," << csv::number(r.measured) << ","
                  << csv::number(r.simulated) << "," << csv::number(r.measured - r.simulated)
                  << "\n";
    if (!opt.out.empty()) {
        csv::Writer w(opt.out);
        w.row({"genotype", "measured", "simulated", "residual"});
        for (const auto& r : records)
            w.row({r.genotype, csv::number(r.measured), csv::number(r.simulated),
                   csv::number(r.measured - r.simulated)});
    }
    return 0;
}

int cmd_export_field(const CommonOptions& opt) {
    RunConfig cfg = RunConfig::from_file(opt.config_path);
    apply_seed_override(cfg, opt.seed);
    set_thread_count(resolve_threads(opt, &cfg));
    std::string out = opt.out.empty() ? "field.ply" : opt.out;
    double scale = convert_spacing(1.0, opt.unit);

    PlantModel plant = load_or_generate_plant(cfg);
    SceneField scene = build_field(cfg.field, plant);
    save_ply(scene.mesh, out, /*binary=*/true, scale);
    std::cout << "export-field: " << scene.mesh.size() << " triangles ("
              << scene.plant_count() << " plants) -> " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PAR interception in virtual maize canopies"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string pairs_path;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", opt.config_path, "JSON run configuration");
        if (needs_config) c->required();
        sub->add_option("--out", opt.out, "output file or directory");
        sub->add_option("--seed", opt.seed, "override every configured seed");
        sub->add_option("--threads", opt.threads,
                        "worker threads (default: CANOPY_PAR_THREADS or hardware)");
        sub->add_option("--unit", opt.unit, "coordinate unit for PLY files")
            ->check(CLI::IsMember({"m", "cm", "mm", "inch"}));
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run a configured season");
    add_common(simulate, true);
    CLI::App* sweep = app.add_subcommand("sweep", "run a scenario sweep");
    add_common(sweep, true);
    CLI::App* gen_plant = app.add_subcommand("gen-plant", "write a procedural plant PLY");
    add_common(gen_plant, false);
    CLI::App* validate = app.add_subcommand("validate", "R^2 of simulated vs measured fractions");
    validate->add_option("--pairs", pairs_path, "CSV of measured/simulated fractions")->required();
    add_common(validate, false);
    CLI::App* export_field = app.add_subcommand("export-field", "write field geometry as PLY");
    add_common(export_field, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(opt);
        if (sweep->parsed()) return cmd_sweep(opt);
        if (gen_plant->parsed()) return cmd_gen_plant(opt);
        if (validate->parsed()) return cmd_validate(opt, pairs_path);
        if (export_field->parsed()) return cmd_export_field(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
