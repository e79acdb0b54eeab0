#pragma once

#include <string>
#include <vector>

#include "canopar/csv.hpp"
#include "canopar/field.hpp"
#include "canopar/radiation.hpp"
#include "canopar/simdriver.hpp"

namespace canopar {

inline void write_flux_csv(const std::string& path, const SceneField& scene, const FluxMap& flux) {
    if (flux.size() != scene.mesh.size()) throw Error("write_flux_csv: flux map size mismatch");
    csv::Writer w(path);
    w.row({"primitive_id", "plant_id", "organ", "area_m2", "incident_direct", "incident_diffuse",
           "incident_scattered", "absorbed"});
    for (std::size_t p = 0; p < flux.size(); ++p) {
        const Triangle& t = scene.mesh.triangles[p];
        w.row({std::to_string(t.primitive_id), std::to_string(t.plant_id), organ_name(t.organ),
               csv::number(triangle_area(t)), csv::number(flux.incident_direct[p]),
               csv::number(flux.incident_diffuse[p]), csv::number(flux.incident_scattered[p]),
               csv::number(flux.absorbed[p])});
    }
}

inline void write_daily_csv(const std::string& path, const SeasonalResult& season) {
    csv::Writer w(path);
    w.row({"date", "plant_id", "par_mol_per_plant"});
    for (const DailyResult& day : season.days)
        for (std::size_t p = 0; p < day.per_plant_mol.size(); ++p)
            w.row({day.date.iso(), std::to_string(p), csv::number(day.per_plant_mol[p])});
}

inline void write_seasonal_csv(const std::string& path, const SeasonalResult& season) {
    csv::Writer w(path);
    w.row({"date", "par_per_ground_area_mol_m2", "par_per_plant_mol", "mean_fraction_intercepted"});
    for (const DailyResult& day : season.days)
        w.row({day.date.iso(), csv::number(day.per_ground_area_mol),
               csv::number(day.mean_per_plant_mol()), csv::number(day.mean_fraction)});
    double mean_plant = 0.0;
    if (!season.season_per_plant_mol.empty()) {
        for (double v : season.season_per_plant_mol) mean_plant += v;
        mean_plant /= static_cast<double>(season.season_per_plant_mol.size());
    }
    w.row({"SEASON", csv::number(season.season_per_ground_area_mol), csv::number(mean_plant),
           csv::number(season.mean_fraction)});
}

inline void write_sensors_csv(const std::string& path, const SeasonalResult& season) {
    csv::Writer w(path);
    w.row({"timestamp", "sensor_id", "par_flux", "fraction_intercepted"});
    for (const DailyResult& day : season.days) {
        for (std::size_t i = 0; i < day.times.size(); ++i) {
            if (i >= day.sensor_readings.size() || !day.sensor_readings[i]) continue;
            const SensorReading& r = *day.sensor_readings[i];
            std::string stamp = TimePoint{day.date, day.times[i]}.iso();
            for (std::size_t s = 0; s < r.par_flux.size(); ++s)
                w.row({stamp, std::to_string(s), csv::number(r.par_flux[s]),
                       csv::number(r.fraction_intercepted)});
        }
    }
}

inline void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    csv::Writer w(path);
    w.row({"row_spacing_m", "plant_spacing_m", "orientation", "row_azimuth_deg", "location", "date",
           "par_per_ground_area_mol_m2", "par_per_plant_mol", "mean_fraction_intercepted",
           "status"});
    for (const SweepRow& r : rows) {
        bool failed = r.status != "ok";
        w.row({csv::number(r.row_spacing), csv::number(r.plant_spacing),
               orientation_name(r.orientation), csv::number(r.row_azimuth * 180.0 / kPi),
               r.location, r.date,
               failed ? std::string() : csv::number(r.par_per_ground_area_mol_m2),
               failed ? std::string() : csv::number(r.par_per_plant_mol),
               csv::number(r.mean_fraction), r.status});
    }
}

}  // namespace canopar
