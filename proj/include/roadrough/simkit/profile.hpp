#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "roadrough/core/error.hpp"

namespace roadrough::simkit {

/// Longitudinal elevation samples on a uniform grid.
struct RoadProfile {
    double dx = 0.25; // m
    std::vector<double> elevation; // m

    double length() const { return elevation.empty() ? 0.0 : dx * static_cast<double>(elevation.size() - 1); }

    /// Linear interpolation at distance `s` (clamped to the profile extent).
    double at(double s) const
    {
        if (elevation.empty()) return 0.0;
        if (s <= 0.0) return elevation.front();
        const double pos = s / dx;
        const auto i = static_cast<std::size_t>(pos);
        if (i + 1 >= elevation.size()) return elevation.back();
        const double f = pos - static_cast<double>(i);
        return elevation[i] + f * (elevation[i + 1] - elevation[i]);
    }

    void validate() const
    {
        detail::require(dx > 0.0 && std::isfinite(dx), "profile: dx must be positive");
        detail::require(elevation.size() >= 2, "profile: need at least two samples");
        for (double e : elevation)
            if (!std::isfinite(e)) throw InvalidInput("profile: non-finite elevation");
    }

    RoadProfile scaled(double alpha) const
    {
        RoadProfile p = *this;
        for (double& e : p.elevation) e *= alpha;
        return p;
    }
};

/// Displacement PSD G(n) = g0 * (n / n0)^-2 with n0 = 0.1 cycle/m.
struct SpectrumBand {
    double n_lo = 0.011; // cycle/m
    double n_hi = 2.83;  // cycle/m, clipped to the grid Nyquist
    std::size_t components = 1024;
};

inline constexpr double kReferenceSpatialFreq = 0.1; // cycle/m

namespace detail {

/// Adds sum_i A_i cos(2 pi n_i x + phi_i) onto `out` using a phasor recurrence.
inline void add_cosines(std::vector<double>& out, double dx, double g0, const SpectrumBand& band,
                        std::mt19937_64& rng)
{
    const double n_hi = std::min(band.n_hi, 0.5 / dx);
    if (!(n_hi > band.n_lo) || band.components == 0) return;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double log_lo = std::log(band.n_lo);
    const double step = (std::log(n_hi) - log_lo) / static_cast<double>(band.components);
    constexpr std::size_t kResync = 4096;

    for (std::size_t c = 0; c < band.components; ++c) {
        const double a = std::exp(log_lo + step * static_cast<double>(c));
        const double b = std::exp(log_lo + step * static_cast<double>(c + 1));
        const double n = a + (b - a) * unit(rng);
        const double phase = 2.0 * std::numbers::pi * unit(rng);
        const double psd = g0 * std::pow(n / kReferenceSpatialFreq, -2.0);
        const double amp = std::sqrt(2.0 * psd * (b - a));
        const double w = 2.0 * std::numbers::pi * n * dx;
        const double cw = std::cos(w), sw = std::sin(w);
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (i % kResync == 0) {
                const double theta = w * static_cast<double>(i) + phase;
                re = std::cos(theta);
                im = std::sin(theta);
            }
            out[i] += amp * re;
            const double nre = re * cw - im * sw;
            im = re * sw + im * cw;
            re = nre;
        }
    }
}

inline void remove_mean(std::vector<double>& v)
{
    if (v.empty()) return;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    for (double& x : v) x -= m;
}

} // namespace detail

/// Zero-mean random profile by superposed cosines with uniform random phases,
/// one per log-spaced frequency band. Deterministic per seed.
inline RoadProfile generate_profile(double length, double dx, double roughness_coeff, std::uint64_t seed,
                                    const SpectrumBand& band = {})
{
    roadrough::detail::require(dx > 0.0, "generate_profile: dx must be positive");
    roadrough::detail::require(length >= dx, "generate_profile: length must cover at least one step");
    roadrough::detail::require(roughness_coeff >= 0.0, "generate_profile: roughness coefficient must be >= 0");
    RoadProfile p;
    p.dx = dx;
    p.elevation.assign(static_cast<std::size_t>(std::llround(length / dx)) + 1, 0.0);
    if (roughness_coeff == 0.0) return p;
    std::mt19937_64 rng(seed);
    detail::add_cosines(p.elevation, dx, roughness_coeff, band, rng);
    detail::remove_mean(p.elevation);
    return p;
}

/// Piecewise-constant roughness coefficient along the route.
struct RoughnessField {
    struct Section {
        double start = 0.0; // m
        double g0 = 0.0;    // m^3
    };
    std::vector<Section> sections; // sorted by start
    double ramp = 20.0;            // m over which amplitude blends between sections

    double g0_at(double s) const
    {
        if (sections.empty()) return 0.0;
        auto it = std::upper_bound(sections.begin(), sections.end(), s,
                                   [](double v, const Section& sec) { return v < sec.start; });
        if (it == sections.begin()) return sections.front().g0;
        return std::prev(it)->g0;
    }

    /// sqrt(g0) blended linearly across section boundaries.
    double amplitude_at(double s) const
    {
        if (sections.empty()) return 0.0;
        double a = std::sqrt(g0_at(s));
        for (std::size_t i = 1; i < sections.size(); ++i) {
            const double b = sections[i].start;
            if (std::abs(s - b) < ramp / 2) {
                const double f = (s - (b - ramp / 2)) / ramp;
                return (1 - f) * std::sqrt(sections[i - 1].g0) + f * std::sqrt(sections[i].g0);
            }
        }
        return a;
    }
};

/// Sections of random length with log-uniform roughness coefficients.
inline RoughnessField random_roughness_field(double length, double g0_min, double g0_max, double min_section,
                                             double max_section, std::uint64_t seed)
{
    roadrough::detail::require(g0_min > 0 && g0_max >= g0_min, "random_roughness_field: bad g0 range");
    roadrough::detail::require(min_section > 0 && max_section >= min_section,
                               "random_roughness_field: bad section range");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RoughnessField f;
    double s = 0.0;
    while (s < length) {
        const double g0 = std::exp(std::log(g0_min) + unit(rng) * (std::log(g0_max) - std::log(g0_min)));
        f.sections.push_back({s, g0});
        s += min_section + unit(rng) * (max_section - min_section);
    }
    return f;
}

/// Route-scale profile: a unit-coefficient stationary profile modulated by the
/// local amplitude sqrt(g0(s)) of the roughness field.
inline RoadProfile generate_route_profile(double length, double dx, const RoughnessField& field,
                                          std::uint64_t seed, const SpectrumBand& band = {})
{
    RoadProfile p = generate_profile(length, dx, 1.0, seed, band);
    for (std::size_t i = 0; i < p.elevation.size(); ++i)
        p.elevation[i] *= field.amplitude_at(dx * static_cast<double>(i));
    return p;
}

} // namespace roadrough::simkit
