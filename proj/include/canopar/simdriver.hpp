#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "canopar/radiation.hpp"
#include "canopar/solar.hpp"

namespace canopar {

struct Schedule {
    TimeOfDay start_time{7, 0};
    TimeOfDay end_time{20, 0};
    int time_step_minutes = 60;
    Date date_start{2020, 7, 15};
    Date date_end{2020, 8, 15};
    int date_stride = 1;  // every k-th day; totals are rescaled linearly
    GeoLocation location{};
    SkyModelParams sky{};

    void validate() const {
        if (!(start_time < end_time)) throw Error("schedule: start_time must precede end_time");
        if (time_step_minutes < 1) throw Error("schedule: time_step_minutes must be >= 1");
        if (!date_start.valid() || !date_end.valid() || date_end < date_start)
            throw Error("schedule: invalid date range");
        if (date_stride < 1) throw Error("schedule: date_stride must be >= 1");
    }

    // Nodes from start to end; a trailing partial step ends exactly at end.
    std::vector<TimeOfDay> times() const {
        std::vector<TimeOfDay> out;
        for (int m = start_time.minutes(); m < end_time.minutes(); m += time_step_minutes)
            out.push_back(TimeOfDay{m / 60, m % 60});
        out.push_back(end_time);
        return out;
    }

    std::vector<Date> dates() const {
        std::vector<Date> out;
        Date d = date_start;
        int index = 0;
        while (!(date_end < d)) {
            if (index % date_stride == 0) out.push_back(d);
            d = d.next();
            ++index;
        }
        return out;
    }

    int total_days() const {
        int n = 0;
        Date d = date_start;
        while (!(date_end < d)) {
            ++n;
            d = d.next();
        }
        return n;
    }
};

// Trapezoidal integral of a power series (umol s^-1 at the given times of
// day), returned in mol.
inline double integrate_power_series(const std::vector<TimeOfDay>& times,
                                     const std::vector<double>& power) {
    if (times.size() != power.size()) throw Error("integrate_power_series: size mismatch");
    double umol = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        double dt = (times[i + 1].minutes() - times[i].minutes()) * 60.0;
        umol += 0.5 * (power[i] + power[i + 1]) * dt;
    }
    return umol * 1e-6;
}

struct TimepointResult {
    TimePoint when;
    SolarState sun;
    FluxMap flux;                    // zero-filled when the sun is down
    PlantInterception interception;
    std::optional<SensorReading> sensors;
};

// One radiative snapshot: sun position -> clear-sky fluxes -> direct +
// diffuse + scattering -> sensors.
inline TimepointResult run_timepoint(const SceneField& scene, const GeoLocation& loc,
                                     const SkyModelParams& sky, const TimePoint& tp,
                                     const RadiationConfig& cfg,
                                     const std::vector<SensorSpec>& sensors = {}) {
    TimepointResult result;
    result.when = tp;
    result.sun = solar_state(loc, tp, sky);
    if (!result.sun.sun_up) {
        result.flux.resize(scene.mesh.size());
        result.interception.absorbed_power.assign(std::max(scene.plant_count(), 0), 0.0);
        return result;
    }
    result.flux = solve_radiation(scene, result.sun, cfg);
    result.interception = per_plant_interception(result.flux, scene);
    if (!sensors.empty())
        result.sensors = read_sensors(scene, result.sun, result.flux, sensors, cfg);
    return result;
}

struct DailyResult {
    Date date;
    std::vector<TimeOfDay> times;
    std::vector<double> per_plant_mol;         // mol plant^-1 day^-1
    double per_ground_area_mol = 0.0;          // mol m^-2 day^-1
    std::vector<std::optional<double>> fraction_series;
    std::vector<std::optional<SensorReading>> sensor_readings;
    std::optional<double> mean_fraction;       // over timepoints with a defined fraction

    double mean_per_plant_mol() const {
        if (per_plant_mol.empty()) return 0.0;
        double s = 0.0;
        for (double v : per_plant_mol) s += v;
        return s / static_cast<double>(per_plant_mol.size());
    }
};

inline DailyResult run_day(const SceneField& scene, const Schedule& schedule, const Date& date,
                           const RadiationConfig& cfg,
                           const std::vector<SensorSpec>& sensors = {}) {
    schedule.validate();
    DailyResult day;
    day.date = date;
    day.times = schedule.times();
    const int n_plants = std::max(scene.plant_count(), 0);
    std::vector<std::vector<double>> plant_power(n_plants);
    std::vector<double> canopy_power;
    for (const TimeOfDay& t : day.times) {
        TimepointResult r =
            run_timepoint(scene, schedule.location, schedule.sky, TimePoint{date, t}, cfg, sensors);
        for (int p = 0; p < n_plants; ++p) plant_power[p].push_back(r.interception.absorbed_power[p]);
        canopy_power.push_back(r.interception.canopy_power);
        day.fraction_series.push_back(r.sensors ? r.sensors->fraction_intercepted : std::nullopt);
        day.sensor_readings.push_back(std::move(r.sensors));
    }
    day.per_plant_mol.resize(n_plants);
    for (int p = 0; p < n_plants; ++p)
        day.per_plant_mol[p] = integrate_power_series(day.times, plant_power[p]);
    day.per_ground_area_mol =
        integrate_power_series(day.times, canopy_power) / scene.ground_area();
    double frac_sum = 0.0;
    int frac_n = 0;
    for (const auto& f : day.fraction_series)
        if (f) {
            frac_sum += *f;
            ++frac_n;
        }
    if (frac_n > 0) day.mean_fraction = frac_sum / frac_n;
    return day;
}

struct SeasonalResult {
    std::vector<DailyResult> days;             // sampled dates only
    std::vector<double> season_per_plant_mol;  // scaled to the full date range
    double season_per_ground_area_mol = 0.0;
    std::optional<double> mean_fraction;
    double date_scale = 1.0;  // full days / sampled days (1 when stride == 1)
};

inline SeasonalResult run_season(const SceneField& scene, const Schedule& schedule,
                                 const RadiationConfig& cfg,
                                 const std::vector<SensorSpec>& sensors = {}) {
    schedule.validate();
    SeasonalResult season;
    auto dates = schedule.dates();
    for (const Date& d : dates) season.days.push_back(run_day(scene, schedule, d, cfg, sensors));
    const int n_plants = std::max(scene.plant_count(), 0);
    season.season_per_plant_mol.assign(n_plants, 0.0);
    for (const DailyResult& day : season.days) {
        for (int p = 0; p < n_plants; ++p) season.season_per_plant_mol[p] += day.per_plant_mol[p];
        season.season_per_ground_area_mol += day.per_ground_area_mol;
    }
    if (schedule.date_stride > 1 && !season.days.empty()) {
        season.date_scale = static_cast<double>(schedule.total_days()) /
                            static_cast<double>(season.days.size());
        for (double& v : season.season_per_plant_mol) v *= season.date_scale;
        season.season_per_ground_area_mol *= season.date_scale;
    }
    double frac_sum = 0.0;
    int frac_n = 0;
    for (const DailyResult& day : season.days)
        if (day.mean_fraction) {
            frac_sum += *day.mean_fraction;
            ++frac_n;
        }
    if (frac_n > 0) season.mean_fraction = frac_sum / frac_n;
    return season;
}

struct ScenarioSpec {
    std::vector<double> row_spacings{0.762};
    std::vector<double> plant_spacings{0.1524};
    std::vector<OrientationMode> orientations{OrientationMode::OffRowParallel};
    std::vector<double> row_azimuths{kPi / 2.0};
    std::vector<std::pair<std::string, GeoLocation>> locations{{"ames_ia", GeoLocation{}}};
    FieldLayout base_layout{};
    PlantParams plant{};
    RadiationConfig radiation{};
    Schedule schedule{};
    bool use_default_sensors = true;

    void validate() const {
        if (row_spacings.empty() || plant_spacings.empty() || orientations.empty() ||
            row_azimuths.empty() || locations.empty())
            throw Error("sweep: every axis needs at least one value");
    }

    std::size_t scenario_count() const {
        return row_spacings.size() * plant_spacings.size() * orientations.size() *
               row_azimuths.size() * locations.size();
    }
};

struct SweepRow {
    double row_spacing = 0.0;
    double plant_spacing = 0.0;
    OrientationMode orientation = OrientationMode::OffRowParallel;
    double row_azimuth = 0.0;
    std::string location;
    std::string date;  // ISO date or "SEASON"
    double par_per_ground_area_mol_m2 = 0.0;
    double par_per_plant_mol = 0.0;
    std::optional<double> mean_fraction;
    std::string status = "ok";
};

// Cartesian sweep in lexicographic axis order (row spacing, plant spacing,
// orientation, row azimuth, location). A failing scenario contributes one
// error row and the sweep continues.
inline std::vector<SweepRow> run_sweep(const ScenarioSpec& spec) {
    spec.validate();
    std::vector<SweepRow> rows;
    PlantModel prototype = generate_maize(spec.plant);
    for (double rs : spec.row_spacings) {
        for (double ps : spec.plant_spacings) {
            for (OrientationMode mode : spec.orientations) {
                for (double raz : spec.row_azimuths) {
                    for (const auto& [loc_name, loc] : spec.locations) {
                        SweepRow base;
                        base.row_spacing = rs;
                        base.plant_spacing = ps;
                        base.orientation = mode;
                        base.row_azimuth = raz;
                        base.location = loc_name;
                        try {
                            FieldLayout layout = spec.base_layout;
                            layout.row_spacing = rs;
                            layout.plant_spacing = ps;
                            layout.orientation = mode;
                            layout.row_azimuth = raz;
                            SceneField scene = build_field(layout, prototype);
                            Schedule schedule = spec.schedule;
                            schedule.location = loc;
                            std::vector<SensorSpec> sensors;
                            if (spec.use_default_sensors) sensors = default_sensors(scene);
                            SeasonalResult season = run_season(scene, schedule, spec.radiation, sensors);
                            for (const DailyResult& day : season.days) {
                                SweepRow r = base;
                                r.date = day.date.iso();
                                r.par_per_ground_area_mol_m2 = day.per_ground_area_mol;
                                r.par_per_plant_mol = day.mean_per_plant_mol();
                                r.mean_fraction = day.mean_fraction;
                                rows.push_back(r);
                            }
                            SweepRow total = base;
                            total.date = "SEASON";
                            total.par_per_ground_area_mol_m2 = season.season_per_ground_area_mol;
                            double mean_plant = 0.0;
                            if (!season.season_per_plant_mol.empty()) {
                                for (double v : season.season_per_plant_mol) mean_plant += v;
                                mean_plant /= static_cast<double>(season.season_per_plant_mol.size());
                            }
                            total.par_per_plant_mol = mean_plant;
                            total.mean_fraction = season.mean_fraction;
                            rows.push_back(total);
                        } catch (const std::exception& e) {
                            SweepRow failed = base;
                            failed.date = "SEASON";
                            failed.status = std::string("error: ") + e.what();
                            rows.push_back(failed);
                        }
                    }
                }
            }
        }
    }
    return rows;
}

}  // namespace canopar
