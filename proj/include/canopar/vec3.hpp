#pragma once

#include <cmath>
#include <ostream>

namespace canopar {

// Coordinate convention used throughout: +x = east, +y = north, +z = up.
// Compass azimuths are measured clockwise from north when viewed from above,
// so the horizontal direction of azimuth a is (sin a, cos a, 0).
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline constexpr double dot(const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) {
    double n = norm(v);
    return n > 0.0 ? v / n : Vec3{0.0, 0.0, 0.0};
}

// Counterclockwise rotation about +z (right-hand rule). A rotation by psi
// shifts compass azimuths by -psi.
inline Vec3 rotate_z(const Vec3& v, double psi) {
    double c = std::cos(psi), s = std::sin(psi);
    return {v.x * c - v.y * s, v.x * s + v.y * c, v.z};
}

// Horizontal unit vector pointing toward compass azimuth a.
inline Vec3 azimuth_direction(double a) { return {std::sin(a), std::cos(a), 0.0}; }

// Compass azimuth of the horizontal component of v, in [0, 2*pi).
inline double direction_azimuth(const Vec3& v) {
    double a = std::atan2(v.x, v.y);
    if (a < 0.0) a += 2.0 * 3.14159265358979323846;
    return a;
}

inline std::ostream& operator<<(std::ostream& os, const Vec3& v) {
    return os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

}  // namespace canopar
