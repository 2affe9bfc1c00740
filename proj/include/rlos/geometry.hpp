#pragma once

#include <cmath>

namespace rlos {

/// Speed of light in vacuum, m/s.
inline constexpr double kSpeedOfLight = 299'792'458.0;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(const Point2& a, const Point2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Position and in-plane orientation of a linear array. The array axis
/// points along (cos(axis_angle), sin(axis_angle)); the default pose puts
/// the array on the x-axis centered at the origin.
struct Pose {
    Point2 center{};
    double axis_angle_rad = 0.0;

    friend bool operator==(const Pose&, const Pose&) = default;
};

}  // namespace rlos
