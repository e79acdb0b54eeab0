#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "canopar/geometry.hpp"

namespace canopar {

struct Date {
    int year = 2020;
    int month = 7;
    int day = 15;

    bool operator==(const Date&) const = default;
    auto operator<=>(const Date&) const = default;

    static bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

    static int days_in_month(int y, int m) {
        static const int d[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        return (m == 2 && leap(y)) ? 29 : d[m - 1];
    }

    bool valid() const {
        return month >= 1 && month <= 12 && day >= 1 && day <= days_in_month(year, month);
    }

    int day_of_year() const {
        static const int cum[12] = {0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334};
        return cum[month - 1] + day + ((month > 2 && leap(year)) ? 1 : 0);
    }

    Date next() const {
        Date d = *this;
        if (++d.day > days_in_month(d.year, d.month)) {
            d.day = 1;
            if (++d.month > 12) {
                d.month = 1;
                ++d.year;
            }
        }
        return d;
    }

    std::string iso() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
        return buf;
    }
};

struct TimeOfDay {
    int hour = 12;
    int minute = 0;

    auto operator<=>(const TimeOfDay&) const = default;
    double hours() const { return hour + minute / 60.0; }
    int minutes() const { return hour * 60 + minute; }

    std::string hhmm() const {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "%02d:%02d", hour, minute);
        return buf;
    }
};

struct TimePoint {
    Date date;
    TimeOfDay time;

    std::string iso() const { return date.iso() + "T" + time.hhmm(); }
};

struct GeoLocation {
    double latitude = 42.03;    // degrees, +N (default: Ames, IA vicinity)
    double longitude = -93.63;  // degrees, +E
    double utc_offset = -5.0;   // hours ahead of UTC (local clock, no DST logic)
};

struct SolarState {
    double zenith = 0.0;   // radians
    double azimuth = 0.0;  // radians, clockwise from north
    bool sun_up = false;
    double direct_normal_par = 0.0;      // umol m^-2 s^-1
    double diffuse_horizontal_par = 0.0; // umol m^-2 s^-1

    // Unit vector pointing from the ground toward the sun.
    Vec3 direction() const {
        double sz = std::sin(zenith);
        return {sz * std::sin(azimuth), sz * std::cos(azimuth), std::cos(zenith)};
    }
};

// Simple single-band clear-sky PAR model (Campbell-Norman style): beam flux
// attenuated by tau^airmass, diffuse as a fixed fraction of the depleted beam.
struct SkyModelParams {
    double extraterrestrial_par = 2400.0;  // umol m^-2 s^-1
    double atmospheric_transmittance = 0.75;
    double diffuse_coefficient = 0.3;

    void validate() const {
        if (!(extraterrestrial_par > 0.0)) throw Error("sky: extraterrestrial_par must be > 0");
        if (!(atmospheric_transmittance > 0.0 && atmospheric_transmittance < 1.0))
            throw Error("sky: atmospheric_transmittance must be in (0, 1)");
        if (diffuse_coefficient < 0.0) throw Error("sky: diffuse_coefficient must be >= 0");
    }
};

namespace solar_detail {

inline double julian_day(const Date& d, double hours_utc) {
    int a = (14 - d.month) / 12;
    int y = d.year + 4800 - a;
    int m = d.month + 12 * a - 3;
    long jdn = d.day + (153L * m + 2) / 5 + 365L * y + y / 4 - y / 100 + y / 400 - 32045;
    return static_cast<double>(jdn) - 0.5 + hours_utc / 24.0;
}

}  // namespace solar_detail

// Sun zenith and azimuth, NOAA solar-calculator formulation (Meeus). Accurate
// to well under 0.1 degrees for 1950-2050; no atmospheric refraction.
inline std::pair<double, double> solar_position(const GeoLocation& loc, const TimePoint& tp) {
    using std::cos;
    using std::sin;
    if (!tp.date.valid()) throw Error("solar_position: invalid date " + tp.date.iso());

    const double local_hours = tp.time.hours();
    const double jd = solar_detail::julian_day(tp.date, local_hours - loc.utc_offset);
    const double T = (jd - 2451545.0) / 36525.0;

    const double mean_long = std::fmod(280.46646 + T * (36000.76983 + 0.0003032 * T), 360.0);
    const double mean_anom = 357.52911 + T * (35999.05029 - 0.0001537 * T);
    const double ecc = 0.016708634 - T * (0.000042037 + 0.0000001267 * T);
    const double mr = mean_anom * kPi / 180.0;
    const double eq_center = sin(mr) * (1.914602 - T * (0.004817 + 0.000014 * T)) +
                             sin(2 * mr) * (0.019993 - 0.000101 * T) + sin(3 * mr) * 0.000289;
    const double omega = (125.04 - 1934.136 * T) * kPi / 180.0;
    const double apparent_long =
        (mean_long + eq_center - 0.00569 - 0.00478 * sin(omega)) * kPi / 180.0;
    const double mean_obliq =
        23.0 + (26.0 + 21.448 / 60.0) / 60.0 -
        (46.8150 * T + 0.00059 * T * T - 0.001813 * T * T * T) / 3600.0;
    const double obliq = (mean_obliq + 0.00256 * cos(omega)) * kPi / 180.0;

    const double decl = std::asin(sin(obliq) * sin(apparent_long));
    const double vy = std::tan(obliq / 2.0) * std::tan(obliq / 2.0);
    const double l0r = mean_long * kPi / 180.0;
    const double eqtime_min =
        4.0 * (180.0 / kPi) *
        (vy * sin(2 * l0r) - 2.0 * ecc * sin(mr) + 4.0 * ecc * vy * sin(mr) * cos(2 * l0r) -
         0.5 * vy * vy * sin(4 * l0r) - 1.25 * ecc * ecc * sin(2 * mr));

    double tst = std::fmod(local_hours * 60.0 + eqtime_min + 4.0 * loc.longitude -
                               60.0 * loc.utc_offset,
                           1440.0);
    if (tst < 0.0) tst += 1440.0;
    const double hour_angle_deg = tst / 4.0 - 180.0;
    const double ha = hour_angle_deg * kPi / 180.0;
    const double lat = loc.latitude * kPi / 180.0;

    double cos_zen = sin(lat) * sin(decl) + cos(lat) * cos(decl) * cos(ha);
    cos_zen = std::clamp(cos_zen, -1.0, 1.0);
    const double zenith = std::acos(cos_zen);

    double azimuth;
    const double denom = cos(lat) * sin(zenith);
    if (std::abs(denom) < 1e-12) {
        azimuth = kPi;  // sun at zenith/nadir: azimuth undefined, pick south
    } else {
        double cos_az = std::clamp((sin(lat) * cos_zen - sin(decl)) / denom, -1.0, 1.0);
        double a = std::acos(cos_az);
        azimuth = hour_angle_deg > 0.0 ? std::fmod(a + kPi, 2 * kPi)
                                       : std::fmod(3 * kPi - a, 2 * kPi);
    }
    return {zenith, azimuth};
}

// Kasten-Young (1989) relative optical airmass; zenith in radians.
inline double airmass(double zenith) {
    double zen_deg = zenith * 180.0 / kPi;
    return 1.0 / (std::cos(zenith) + 0.50572 * std::pow(96.07995 - zen_deg, -1.6364));
}

// Direct-normal and diffuse-horizontal PAR for a given solar zenith. Both are
// zero when the sun is at or below the horizon.
inline std::pair<double, double> clear_sky_par(double zenith, const SkyModelParams& p = {}) {
    if (zenith < 0.0 || zenith > kPi) throw Error("clear_sky_par: zenith out of [0, pi]");
    if (zenith >= kPi / 2.0) return {0.0, 0.0};
    const double m = airmass(zenith);
    const double beam_frac = std::pow(p.atmospheric_transmittance, m);
    const double dni = p.extraterrestrial_par * beam_frac;
    const double diffuse =
        p.diffuse_coefficient * p.extraterrestrial_par * (1.0 - beam_frac) * std::cos(zenith);
    return {dni, diffuse};
}

inline SolarState solar_state(const GeoLocation& loc, const TimePoint& tp,
                              const SkyModelParams& sky = {}) {
    SolarState s;
    auto [zen, az] = solar_position(loc, tp);
    s.zenith = zen;
    s.azimuth = az;
    s.sun_up = zen < kPi / 2.0;
    if (s.sun_up) {
        auto [dni, dif] = clear_sky_par(zen, sky);
        s.direct_normal_par = dni;
        s.diffuse_horizontal_par = dif;
    }
    return s;
}

}  // namespace canopar
