#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "roadrough/core/polyline.hpp"
#include "roadrough/core/types.hpp"
#include "roadrough/simkit/quarter_car.hpp"

namespace roadrough::simkit {

/// Speed as a piecewise-linear function of distance along the route.
struct SpeedProfile {
    struct Knot {
        double s = 0.0;     // m
        double speed = 0.0; // m/s
    };
    std::vector<Knot> knots;

    static SpeedProfile constant(double v) { return {{{0.0, v}}}; }

    double at(double s) const
    {
        roadrough::detail::require(!knots.empty(), "speed profile: no knots");
        if (s <= knots.front().s) return knots.front().speed;
        if (s >= knots.back().s) return knots.back().speed;
        auto it = std::upper_bound(knots.begin(), knots.end(), s,
                                   [](double v, const Knot& k) { return v < k.s; });
        const auto& b = *it;
        const auto& a = *std::prev(it);
        return a.speed + (s - a.s) / (b.s - a.s) * (b.speed - a.speed);
    }

    void validate() const
    {
        roadrough::detail::require(!knots.empty(), "speed profile: no knots");
        for (std::size_t i = 0; i < knots.size(); ++i) {
            roadrough::detail::require(knots[i].speed > 0, "speed profile: speeds must be > 0");
            if (i) roadrough::detail::require(knots[i].s > knots[i - 1].s, "speed profile: knots must increase");
        }
    }
};

/// Knots every `spacing` m with speeds drawn uniformly in [v_min, v_max].
inline SpeedProfile random_speed_profile(double length, double spacing, double v_min, double v_max,
                                         std::uint64_t seed)
{
    roadrough::detail::require(spacing > 0 && v_min > 0 && v_max >= v_min, "random_speed_profile: bad arguments");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> speed(v_min, v_max);
    SpeedProfile p;
    for (double s = 0.0; s <= length + spacing; s += spacing) p.knots.push_back({s, speed(rng)});
    return p;
}

struct SimConfig {
    QuarterCarParams vehicle;
    SpeedProfile speed_profile = SpeedProfile::constant(20.0);
    double acc_rate = 50.0;       // Hz
    double gps_rate = 1.0;        // Hz
    double gps_noise_sigma = 0.0; // m, radial RMS
    double acc_noise_sigma = 0.0; // m/s^2
    double max_substep = 0.002;   // s, integration step bound
    std::uint64_t seed = 0;

    void validate() const
    {
        vehicle.validate();
        speed_profile.validate();
        roadrough::detail::require(acc_rate > 0 && gps_rate > 0, "sim config: rates must be > 0");
        roadrough::detail::require(gps_noise_sigma >= 0 && acc_noise_sigma >= 0, "sim config: sigmas must be >= 0");
        roadrough::detail::require(max_substep > 0, "sim config: max_substep must be > 0");
    }
};

/// Drive the survey vehicle over the profile and record what the in-car
/// sensors would see: noisy vertical acceleration and speed at acc_rate and
/// noisy GPS fixes at gps_rate. Time is integrated from the speed profile.
inline TelemetryTrace synthesize_telemetry(const RoadProfile& profile, const Polyline& route,
                                           const SimConfig& cfg)
{
    profile.validate();
    cfg.validate();
    roadrough::detail::require(!route.empty(), "synthesize_telemetry: empty route geometry");
    const double len = profile.length();
    roadrough::detail::require(std::abs(route.length() - len) <= std::max(1.0, 1e-3 * len),
                               "synthesize_telemetry: route geometry length does not match profile length");

    const double sample_dt = 1.0 / cfg.acc_rate;
    const auto substeps = static_cast<std::size_t>(std::ceil(sample_dt / cfg.max_substep - 1e-12));
    const double dt = sample_dt / static_cast<double>(substeps);
    const auto gps_every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.acc_rate / cfg.gps_rate)));
    const QuarterCarStepper stepper(cfg.vehicle, dt);

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> acc_noise(0.0, 1.0);
    std::normal_distribution<double> gps_noise(0.0, 1.0);
    const double gps_axis_sigma = cfg.gps_noise_sigma / std::sqrt(2.0);
    const double geo_scale = route.length() / len;

    TelemetryTrace trace;
    trace.reserve(static_cast<std::size_t>(len / cfg.speed_profile.at(0.0) * cfg.acc_rate) + 16);
    QuarterCarState x = QuarterCarStepper::at_rest(profile.at(0.0));
    double s = 0.0;
    double y = profile.at(0.0);
    for (std::size_t j = 0;; ++j) {
        TelemetrySample smp;
        smp.t = sample_dt * static_cast<double>(j);
        smp.speed = cfg.speed_profile.at(s);
        smp.acc_z = stepper.sprung_accel(x) + (cfg.acc_noise_sigma > 0 ? cfg.acc_noise_sigma * acc_noise(rng) : 0.0);
        if (j % gps_every == 0) {
            GeoPoint p = route.at(s * geo_scale);
            if (cfg.gps_noise_sigma > 0) {
                const double e = gps_axis_sigma * gps_noise(rng);
                const double n = gps_axis_sigma * gps_noise(rng);
                p = offset(p, e, n);
            }
            smp.gps = p;
        }
        trace.push_back(smp);

        // Advance to the next sample; stop once the route end would be passed.
        double s_next = s;
        QuarterCarState x_next = x;
        double y_cur = y;
        for (std::size_t k = 0; k < substeps; ++k) {
            const double v0 = cfg.speed_profile.at(s_next);
            const double vm = cfg.speed_profile.at(s_next + 0.5 * dt * v0);
            s_next += dt * vm;
            const double y_new = profile.at(s_next);
            x_next = stepper.step(x_next, y_cur, y_new);
            y_cur = y_new;
        }
        if (s_next > len) break;
        s = s_next;
        x = x_next;
        y = y_cur;
    }
    return trace;
}

} // namespace roadrough::simkit
