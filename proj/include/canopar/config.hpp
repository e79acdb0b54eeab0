#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "canopar/field.hpp"
#include "canopar/plantgen.hpp"
#include "canopar/radiation.hpp"
#include "canopar/simdriver.hpp"
#include "canopar/solar.hpp"

namespace canopar {

// JSON run configuration. Unknown keys are rejected by name; angles are given
// in degrees and spacings in a declared unit, converted on load. A top-level
// seed feeds every component unless a block carries its own.

namespace config_detail {

using json = nlohmann::json;

inline void check_keys(const json& obj, const std::string& path,
                       const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw Error("config: '" + path + "' must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw Error("config: unknown key '" + (path.empty() ? it.key() : path + "." + it.key()) + "'");
    }
}

template <class T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error("config: bad value for '" + key + "'");
    }
}

inline double deg2rad(double d) { return d * kPi / 180.0; }

inline TimeOfDay parse_time(const std::string& s) {
    int h = 0, m = 0;
    if (std::sscanf(s.c_str(), "%d:%d", &h, &m) != 2 || h < 0 || h > 23 || m < 0 || m > 59)
        throw Error("config: bad time '" + s + "' (expected HH:MM)");
    return {h, m};
}

inline Date parse_date(const std::string& s) {
    int y = 0, mo = 0, d = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d", &y, &mo, &d) != 3)
        throw Error("config: bad date '" + s + "' (expected YYYY-MM-DD)");
    Date date{y, mo, d};
    if (!date.valid()) throw Error("config: invalid date '" + s + "'");
    return date;
}

// Documented configuration defaults for the three study locations; latitude,
// longitude, and (daylight) UTC offset are this tool's choices, not survey
// coordinates.
inline std::optional<GeoLocation> location_preset(const std::string& name) {
    if (name == "ames_ia") return GeoLocation{42.03, -93.63, -5.0};
    if (name == "thomas_county_ks") return GeoLocation{39.35, -101.05, -5.0};
    if (name == "bismarck_nd") return GeoLocation{46.81, -100.78, -5.0};
    return std::nullopt;
}

inline GeoLocation parse_location(const json& j, const std::string& path) {
    if (j.is_string()) {
        auto preset = location_preset(j.get<std::string>());
        if (!preset) throw Error("config: unknown location preset '" + j.get<std::string>() + "'");
        return *preset;
    }
    check_keys(j, path, {"name", "latitude", "longitude", "utc_offset"});
    GeoLocation loc;
    if (j.contains("name")) {
        auto preset = location_preset(j.at("name").get<std::string>());
        if (preset) loc = *preset;
    }
    loc.latitude = get_or(j, "latitude", loc.latitude);
    loc.longitude = get_or(j, "longitude", loc.longitude);
    loc.utc_offset = get_or(j, "utc_offset", loc.utc_offset);
    if (std::abs(loc.latitude) > 90.0 || std::abs(loc.longitude) > 180.0)
        throw Error("config: latitude/longitude out of range in '" + path + "'");
    return loc;
}

}  // namespace config_detail

struct SweepConfig {
    std::vector<double> row_spacings;    // meters
    std::vector<double> plant_spacings;  // meters
    std::vector<OrientationMode> orientations;
    std::vector<double> row_azimuths;    // radians
    std::vector<std::pair<std::string, GeoLocation>> locations;
};

struct RunConfig {
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    int threads = 0;  // 0 = hardware concurrency
    PlantParams plant{};
    std::optional<std::string> plant_ply;  // load instead of generating
    double ply_scale = 1.0;
    FieldLayout field{};
    SkyModelParams sky{};
    RadiationConfig radiation{};
    Schedule schedule{};
    std::optional<TimePoint> flux_snapshot;
    std::optional<SweepConfig> sweep;

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("config: cannot open '" + path + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw Error(std::string("config: JSON parse error: ") + e.what());
        }
        return from_json(j);
    }

    ScenarioSpec to_scenario_spec() const {
        if (!sweep) throw Error("config: no sweep block");
        ScenarioSpec spec;
        spec.row_spacings = sweep->row_spacings;
        spec.plant_spacings = sweep->plant_spacings;
        spec.orientations = sweep->orientations;
        spec.row_azimuths = sweep->row_azimuths;
        spec.locations = sweep->locations;
        spec.base_layout = field;
        spec.plant = plant;
        spec.radiation = radiation;
        spec.schedule = schedule;
        spec.schedule.sky = sky;
        return spec;
    }
};

inline RunConfig RunConfig::from_json(const nlohmann::json& j) {
    using namespace config_detail;
    RunConfig cfg;
    check_keys(j, "", {"seed", "output_dir", "threads", "plant", "field", "sky", "radiation",
                       "schedule", "flux_snapshot", "sweep"});
    cfg.seed = get_or<std::uint64_t>(j, "seed", 1);
    cfg.output_dir = get_or<std::string>(j, "output_dir", "out");
    cfg.threads = get_or(j, "threads", 0);
    cfg.plant.seed = cfg.seed;
    cfg.field.orientation_seed = cfg.seed;
    cfg.radiation.rng_seed = cfg.seed;

    if (j.contains("plant")) {
        const json& p = j.at("plant");
        check_keys(p, "plant",
                   {"ply_path", "ply_unit", "height_m", "leaf_count", "leaf_length_m",
                    "leaf_width_m", "base_azimuth_deg", "azimuth_noise_sd_deg",
                    "leaf_inclination_deg", "curvature", "stem_radius_m", "segments_per_leaf",
                    "seed"});
        if (p.contains("ply_path")) {
            cfg.plant_ply = p.at("ply_path").get<std::string>();
            cfg.ply_scale = convert_spacing(1.0, get_or<std::string>(p, "ply_unit", "m"));
        }
        cfg.plant.height = get_or(p, "height_m", cfg.plant.height);
        cfg.plant.leaf_count = get_or(p, "leaf_count", cfg.plant.leaf_count);
        cfg.plant.leaf_length = get_or(p, "leaf_length_m", cfg.plant.leaf_length);
        cfg.plant.leaf_width = get_or(p, "leaf_width_m", cfg.plant.leaf_width);
        cfg.plant.phyllotaxy_base_azimuth =
            deg2rad(get_or(p, "base_azimuth_deg", cfg.plant.phyllotaxy_base_azimuth * 180.0 / kPi));
        cfg.plant.phyllotaxy_noise_sd =
            deg2rad(get_or(p, "azimuth_noise_sd_deg", cfg.plant.phyllotaxy_noise_sd * 180.0 / kPi));
        cfg.plant.leaf_inclination =
            deg2rad(get_or(p, "leaf_inclination_deg", cfg.plant.leaf_inclination * 180.0 / kPi));
        cfg.plant.curvature = get_or(p, "curvature", cfg.plant.curvature);
        cfg.plant.stem_radius = get_or(p, "stem_radius_m", cfg.plant.stem_radius);
        cfg.plant.segments_per_leaf = get_or(p, "segments_per_leaf", cfg.plant.segments_per_leaf);
        cfg.plant.seed = get_or(p, "seed", cfg.plant.seed);
        cfg.plant.validate();
    }

    if (j.contains("field")) {
        const json& f = j.at("field");
        check_keys(f, "field",
                   {"rows", "plants_per_row", "row_spacing", "plant_spacing", "spacing_unit",
                    "row_azimuth_deg", "orientation", "seed", "periodic"});
        std::string unit = get_or<std::string>(f, "spacing_unit", "m");
        cfg.field.rows = get_or(f, "rows", cfg.field.rows);
        cfg.field.plants_per_row = get_or(f, "plants_per_row", cfg.field.plants_per_row);
        if (f.contains("row_spacing"))
            cfg.field.row_spacing = convert_spacing(f.at("row_spacing").get<double>(), unit);
        if (f.contains("plant_spacing"))
            cfg.field.plant_spacing = convert_spacing(f.at("plant_spacing").get<double>(), unit);
        cfg.field.row_azimuth =
            deg2rad(get_or(f, "row_azimuth_deg", cfg.field.row_azimuth * 180.0 / kPi));
        if (f.contains("orientation"))
            cfg.field.orientation = orientation_from_name(f.at("orientation").get<std::string>());
        cfg.field.orientation_seed = get_or(f, "seed", cfg.field.orientation_seed);
        cfg.field.periodic = get_or(f, "periodic", cfg.field.periodic);
        cfg.field.validate();
    }

    if (j.contains("sky")) {
        const json& s = j.at("sky");
        check_keys(s, "sky",
                   {"extraterrestrial_par", "atmospheric_transmittance", "diffuse_coefficient"});
        cfg.sky.extraterrestrial_par = get_or(s, "extraterrestrial_par", cfg.sky.extraterrestrial_par);
        cfg.sky.atmospheric_transmittance =
            get_or(s, "atmospheric_transmittance", cfg.sky.atmospheric_transmittance);
        cfg.sky.diffuse_coefficient = get_or(s, "diffuse_coefficient", cfg.sky.diffuse_coefficient);
        cfg.sky.validate();
    }

    if (j.contains("radiation")) {
        const json& r = j.at("radiation");
        check_keys(r, "radiation",
                   {"leaf_reflectance", "leaf_transmittance", "stem_reflectance",
                    "stem_transmittance", "ground_reflectance", "scattering_iterations",
                    "direct_samples", "diffuse_samples", "scatter_samples", "max_wraps", "seed"});
        cfg.radiation.leaf_reflectance = get_or(r, "leaf_reflectance", cfg.radiation.leaf_reflectance);
        cfg.radiation.leaf_transmittance =
            get_or(r, "leaf_transmittance", cfg.radiation.leaf_transmittance);
        cfg.radiation.stem_reflectance = get_or(r, "stem_reflectance", cfg.radiation.stem_reflectance);
        cfg.radiation.stem_transmittance =
            get_or(r, "stem_transmittance", cfg.radiation.stem_transmittance);
        cfg.radiation.ground_reflectance =
            get_or(r, "ground_reflectance", cfg.radiation.ground_reflectance);
        cfg.radiation.scattering_iterations =
            get_or(r, "scattering_iterations", cfg.radiation.scattering_iterations);
        cfg.radiation.direct_samples_per_primitive =
            get_or(r, "direct_samples", cfg.radiation.direct_samples_per_primitive);
        cfg.radiation.diffuse_samples_per_primitive =
            get_or(r, "diffuse_samples", cfg.radiation.diffuse_samples_per_primitive);
        cfg.radiation.scatter_samples_per_primitive =
            get_or(r, "scatter_samples", cfg.radiation.scatter_samples_per_primitive);
        cfg.radiation.max_wraps = get_or(r, "max_wraps", cfg.radiation.max_wraps);
        cfg.radiation.rng_seed = get_or(r, "seed", cfg.radiation.rng_seed);
        cfg.radiation.validate();
    }

    if (j.contains("schedule")) {
        const json& s = j.at("schedule");
        check_keys(s, "schedule",
                   {"start", "end", "step_minutes", "date_start", "date_end", "date_stride",
                    "location"});
        if (s.contains("start")) cfg.schedule.start_time = parse_time(s.at("start").get<std::string>());
        if (s.contains("end")) cfg.schedule.end_time = parse_time(s.at("end").get<std::string>());
        cfg.schedule.time_step_minutes = get_or(s, "step_minutes", cfg.schedule.time_step_minutes);
        if (s.contains("date_start"))
            cfg.schedule.date_start = parse_date(s.at("date_start").get<std::string>());
        if (s.contains("date_end"))
            cfg.schedule.date_end = parse_date(s.at("date_end").get<std::string>());
        cfg.schedule.date_stride = get_or(s, "date_stride", cfg.schedule.date_stride);
        if (s.contains("location"))
            cfg.schedule.location = parse_location(s.at("location"), "schedule.location");
        cfg.schedule.validate();
    }
    cfg.schedule.sky = cfg.sky;

    if (j.contains("flux_snapshot")) {
        const json& fs = j.at("flux_snapshot");
        check_keys(fs, "flux_snapshot", {"date", "time"});
        TimePoint tp;
        tp.date = fs.contains("date") ? parse_date(fs.at("date").get<std::string>())
                                      : cfg.schedule.date_start;
        tp.time = fs.contains("time") ? parse_time(fs.at("time").get<std::string>()) : TimeOfDay{13, 0};
        cfg.flux_snapshot = tp;
    }

    if (j.contains("sweep")) {
        const json& sw = j.at("sweep");
        check_keys(sw, "sweep",
                   {"row_spacings", "plant_spacings", "spacing_unit", "orientations",
                    "row_azimuths_deg", "locations"});
        SweepConfig sc;
        std::string unit = get_or<std::string>(sw, "spacing_unit", "m");
        if (sw.contains("row_spacings"))
            for (double v : sw.at("row_spacings").get<std::vector<double>>())
                sc.row_spacings.push_back(convert_spacing(v, unit));
        else sc.row_spacings.push_back(cfg.field.row_spacing);
        if (sw.contains("plant_spacings"))
            for (double v : sw.at("plant_spacings").get<std::vector<double>>())
                sc.plant_spacings.push_back(convert_spacing(v, unit));
        else sc.plant_spacings.push_back(cfg.field.plant_spacing);
        if (sw.contains("orientations"))
            for (const auto& name : sw.at("orientations").get<std::vector<std::string>>())
                sc.orientations.push_back(orientation_from_name(name));
        else sc.orientations.push_back(cfg.field.orientation);
        if (sw.contains("row_azimuths_deg"))
            for (double v : sw.at("row_azimuths_deg").get<std::vector<double>>())
                sc.row_azimuths.push_back(deg2rad(v));
        else sc.row_azimuths.push_back(cfg.field.row_azimuth);
        if (sw.contains("locations")) {
            int index = 0;
            for (const auto& lj : sw.at("locations")) {
                std::string name = lj.is_string() ? lj.get<std::string>()
                                                  : get_or<std::string>(lj, "name",
                                                                        "location" + std::to_string(index));
                sc.locations.emplace_back(name,
                                          parse_location(lj, "sweep.locations[" + std::to_string(index) + "]"));
                ++index;
            }
        } else {
            sc.locations.emplace_back("default", cfg.schedule.location);
        }
        cfg.sweep = sc;
    }

    return cfg;
}

}  // namespace canopar
