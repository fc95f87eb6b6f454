#pragma once

#include <cmath>
#include <vector>

#include "roadrough/core/polyline.hpp"
#include "roadrough/core/types.hpp"
#include "roadrough/simkit/quarter_car.hpp"

namespace roadrough::simkit {

inline constexpr double kIriSpeed = 80.0 / 3.6; // m/s
inline constexpr double kMaxIriStep = 0.005;    // s
inline constexpr double kMinIriLength = 10.0;   // m

/// Largest dt <= kMaxIriStep that lands on every profile sample at `speed`.
inline double aligned_step(double dx, double speed)
{
    const double knot = dx / speed;
    return knot / std::ceil(knot / kMaxIriStep - 1e-12);
}

namespace detail {

/// Rectified suspension travel, trapezoidal in time, between consecutive samples.
inline std::vector<double> rectified_increments(const QuarterCarResponse& r)
{
    std::vector<double> inc(r.size() > 0 ? r.size() - 1 : 0);
    for (std::size_t k = 0; k + 1 < r.size(); ++k)
        inc[k] = 0.5 * r.dt * (std::abs(r.v_s[k] - r.v_u[k]) + std::abs(r.v_s[k + 1] - r.v_u[k + 1]));
    return inc;
}

} // namespace detail

/// Average rectified slope (m/km) of a quarter-car travelling at `speed`.
/// `max_dt` bounds the step; the step actually used is shortened so that it
/// lands on every profile sample, which makes the stepping exact for the
/// piecewise-linear road.
inline double compute_iri(const RoadProfile& profile, const QuarterCarParams& params, double speed, double max_dt)
{
    profile.validate();
    roadrough::detail::require(speed > 0 && max_dt > 0, "compute_iri: speed and dt must be > 0");
    const double knot = profile.dx / speed;
    const double dt = knot / std::ceil(knot / max_dt - 1e-12);
    roadrough::detail::require(profile.length() >= kMinIriLength - 1e-9,
                               "compute_iri: profile shorter than 10 m");
    const auto resp = quarter_car_response(profile, speed, params, dt);
    double travel = 0.0;
    for (double v : detail::rectified_increments(resp)) travel += v;
    const double covered = speed * dt * static_cast<double>(resp.size() - 1);
    return 1000.0 * travel / covered;
}

/// IRI in m/km: Golden Car at 80 km/h, step aligned to the profile grid.
inline double compute_iri(const RoadProfile& profile)
{
    profile.validate();
    return compute_iri(profile, QuarterCarParams::golden_car(), kIriSpeed, kMaxIriStep);
}

/// Consecutive seg_len pieces of the route, each labelled with the IRI of
/// its stretch. One simulation runs over the whole profile so the vehicle
/// state carries across piece boundaries.
inline std::vector<ReferenceSegment> build_reference_segments(const RoadProfile& profile,
                                                              const Polyline& route, double seg_len)
{
    profile.validate();
    roadrough::detail::require(seg_len > 0, "build_reference_segments: seg_len must be > 0");
    roadrough::detail::require(profile.length() >= seg_len - 1e-9,
                               "build_reference_segments: profile shorter than one segment");
    roadrough::detail::require(!route.empty(), "build_reference_segments: empty route geometry");

    const double dt = aligned_step(profile.dx, kIriSpeed);
    const auto resp = quarter_car_response(profile, kIriSpeed, QuarterCarParams::golden_car(), dt);
    const auto inc = detail::rectified_increments(resp);
    const auto count = static_cast<std::size_t>(std::floor(profile.length() / seg_len + 1e-9));
    std::vector<double> travel(count, 0.0);
    const double step_len = kIriSpeed * dt;
    for (std::size_t k = 0; k < inc.size(); ++k) {
        const auto seg = static_cast<std::size_t>((static_cast<double>(k) + 0.5) * step_len / seg_len);
        if (seg < count) travel[seg] += inc[k];
    }

    const double geo_scale = route.length() / profile.length();
    std::vector<ReferenceSegment> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        ReferenceSegment r;
        const double s0 = seg_len * static_cast<double>(i);
        r.start = route.at(s0 * geo_scale);
        r.end = route.at((s0 + seg_len) * geo_scale);
        r.length = seg_len;
        r.iri = 1000.0 * travel[i] / seg_len;
        out.push_back(r);
    }
    return out;
}

} // namespace roadrough::simkit
