#pragma once

#include <cmath>
#include <numbers>

#include "roadrough/core/error.hpp"

namespace roadrough {

struct GeoPoint {
    double lat = 0.0; // degrees WGS84
    double lon = 0.0; // degrees WGS84

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline constexpr double kEarthRadiusM = 6371008.8;

inline bool is_valid(const GeoPoint& p)
{
    return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
           p.lon >= -180.0 && p.lon <= 180.0;
}

inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

/// Haversine great-circle distance in meters.
inline double great_circle_m(const GeoPoint& a, const GeoPoint& b)
{
    const double p1 = deg2rad(a.lat);
    const double p2 = deg2rad(b.lat);
    const double dp = p2 - p1;
    const double dl = deg2rad(b.lon - a.lon);
    const double s = std::sin(dp / 2) * std::sin(dp / 2) +
                     std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(s)));
}

/// Local east/north tangent plane around an origin. Adequate for the few-km
/// extents handled per projection.
class LocalFrame {
public:
    explicit LocalFrame(const GeoPoint& origin)
        : origin_(origin), cos_lat_(std::cos(deg2rad(origin.lat)))
    {
    }

    struct Xy {
        double x = 0.0; // east, m
        double y = 0.0; // north, m
    };

    Xy to_xy(const GeoPoint& p) const
    {
        return {deg2rad(p.lon - origin_.lon) * kEarthRadiusM * cos_lat_,
                deg2rad(p.lat - origin_.lat) * kEarthRadiusM};
    }

    GeoPoint to_geo(const Xy& q) const
    {
        return {origin_.lat + rad2deg(q.y / kEarthRadiusM),
                origin_.lon + rad2deg(q.x / (kEarthRadiusM * cos_lat_))};
    }

    const GeoPoint& origin() const { return origin_; }

private:
    GeoPoint origin_;
    double cos_lat_;
};

/// Point at fraction `f` along the straight chord a→b (linear in lat/lon).
inline GeoPoint lerp(const GeoPoint& a, const GeoPoint& b, double f)
{
    return {a.lat + f * (b.lat - a.lat), a.lon + f * (b.lon - a.lon)};
}

/// Destination reached by moving `east_m`/`north_m` from `p`.
inline GeoPoint offset(const GeoPoint& p, double east_m, double north_m)
{
    return LocalFrame(p).to_geo({east_m, north_m});
}

} // namespace roadrough
