#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "roadrough/core/polyline.hpp"

namespace roadrough::simkit {

struct RouteShape {
    double min_leg = 300.0;        // m
    double max_leg = 700.0;        // m
    double max_turn_deg = 25.0;    // heading change between legs
    double initial_heading_deg = 60.0;
};

/// Gently curving polyline of (nearly) the requested great-circle length.
/// The final leg is trimmed so the total matches `length`.
inline Polyline make_route(const GeoPoint& origin, double length, std::uint64_t seed, const RouteShape& shape = {})
{
    roadrough::detail::require(length > 0, "make_route: length must be > 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<GeoPoint> pts{origin};
    double heading = shape.initial_heading_deg;
    double done = 0.0;
    while (done < length - 1e-6) {
        double leg = shape.min_leg + unit(rng) * (shape.max_leg - shape.min_leg);
        if (length - done - leg < shape.min_leg / 2) leg = length - done;
        leg = std::min(leg, length - done);
        const double h = deg2rad(heading);
        GeoPoint next = offset(pts.back(), leg * std::sin(h), leg * std::cos(h));
        // Correct for tangent-plane distortion so the leg has the intended length.
        const double actual = great_circle_m(pts.back(), next);
        if (actual > 0) next = lerp(pts.back(), next, leg / actual);
        pts.push_back(next);
        done += leg;
        heading += (2 * unit(rng) - 1) * shape.max_turn_deg;
    }
    return Polyline(std::move(pts));
}

} // namespace roadrough::simkit
