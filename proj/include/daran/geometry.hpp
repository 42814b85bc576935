#pragma once

#include <cmath>

namespace daran {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }
inline double tan_deg(double deg) { return std::tan(deg_to_rad(deg)); }

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm() const { return std::hypot(x, y); }
};

inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Waypoint: horizontal position plus altitude.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double h = 0.0;

    Vec2 xy() const { return {x, y}; }
};

inline double dist3(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dh = a.h - b.h;
    return std::sqrt(dx * dx + dy * dy + dh * dh);
}

inline double hdist(const Vec3& a, const Vec2& b) { return dist(a.xy(), b); }

}  // namespace daran
