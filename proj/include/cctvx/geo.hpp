#pragma once

// Geodesy primitives on a spherical Earth: great-circle and
// equirectangular distances, initial bearings, and interpolation along
// straight legs. Distances are meters, angles decimal degrees.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "errors.hpp"

namespace cctvx {

inline constexpr double kEarthRadius = 6371000.0;  // mean radius [m]
inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// WGS84 position in decimal degrees.
struct GeoPoint {
    double latitude = 0.0;   // [-90, 90]
    double longitude = 0.0;  // [-180, 180]

    bool valid() const {
        return latitude >= -90.0 && latitude <= 90.0 && longitude >= -180.0 &&
               longitude <= 180.0;
    }
    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

// Direction clockwise from true north, normalized to [0, 360).
struct Bearing {
    double degrees = 0.0;
};

inline double normalize_degrees(double deg) {
    deg = std::fmod(deg, 360.0);
    return deg < 0.0 ? deg + 360.0 : deg;
}

// Smallest absolute angle between two bearings, in [0, 180].
inline double bearing_difference(double a, double b) {
    double d = std::fabs(normalize_degrees(a) - normalize_degrees(b));
    return d > 180.0 ? 360.0 - d : d;
}

// Great-circle distance (haversine formula).
inline double haversine_distance(const GeoPoint& a, const GeoPoint& b) {
    double phi1 = a.latitude * kDegToRad;
    double phi2 = b.latitude * kDegToRad;
    double sp = std::sin((b.latitude - a.latitude) * kDegToRad * 0.5);
    double sl = std::sin((b.longitude - a.longitude) * kDegToRad * 0.5);
    double h = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
    return 2.0 * kEarthRadius * std::asin(std::min(1.0, std::sqrt(h)));
}

// Planar approximation via the equirectangular projection about the mean
// latitude of the pair. Stays within a meter of the great-circle value
// for pairs up to ~700 m apart at moderate latitudes; accuracy degrades
// gracefully outside that regime.
inline double euclidean_distance(const GeoPoint& a, const GeoPoint& b) {
    double mean_phi = (a.latitude + b.latitude) * 0.5 * kDegToRad;
    double x = (b.longitude - a.longitude) * kDegToRad * std::cos(mean_phi) *
               kEarthRadius;
    double y = (b.latitude - a.latitude) * kDegToRad * kEarthRadius;
    return std::sqrt(x * x + y * y);
}

enum class DistanceMethod { euclidean, haversine };

inline double distance(DistanceMethod method, const GeoPoint& a,
                       const GeoPoint& b) {
    return method == DistanceMethod::haversine ? haversine_distance(a, b)
                                               : euclidean_distance(a, b);
}

// Forward azimuth from a to b.
inline Bearing initial_bearing(const GeoPoint& a, const GeoPoint& b) {
    if (a.latitude == b.latitude && a.longitude == b.longitude)
        throw Error("degenerate bearing: coincident points");
    double phi1 = a.latitude * kDegToRad;
    double phi2 = b.latitude * kDegToRad;
    double dl = (b.longitude - a.longitude) * kDegToRad;
    double theta = std::atan2(
        std::sin(dl) * std::cos(phi2),
        std::cos(phi1) * std::sin(phi2) -
            std::sin(phi1) * std::cos(phi2) * std::cos(dl));
    return {normalize_degrees(theta * kRadToDeg)};
}

// Point a fraction f of the way from a to b, linear in lat/lon.
inline GeoPoint point_along(const GeoPoint& a, const GeoPoint& b, double f) {
    return {a.latitude + (b.latitude - a.latitude) * f,
            a.longitude + (b.longitude - a.longitude) * f};
}

// Intermediate points spaced `resolution` meters along the straight leg
// from a to b. Empty when the leg is shorter than the resolution. When
// the leg length is an exact multiple of the resolution the last point
// coincides with b.
inline std::vector<GeoPoint> interpolate_leg(
    const GeoPoint& a, const GeoPoint& b, double resolution,
    DistanceMethod method = DistanceMethod::euclidean) {
    if (resolution <= 0.0) throw ConfigError("resolution must be positive");
    double d = distance(method, a, b);
    std::vector<GeoPoint> points;
    if (d < resolution) return points;
    auto steps = static_cast<std::size_t>(std::floor(d / resolution + 1e-9));
    points.reserve(steps);
    for (std::size_t k = 1; k <= steps; ++k)
        points.push_back(point_along(a, b, k * resolution / d));
    return points;
}

}  // namespace cctvx
