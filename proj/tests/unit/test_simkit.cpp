#include <gtest/gtest.h>

#include <chrono>
#include <complex>
#include <numbers>

#include "roadrough/simkit/iri.hpp"
#include "roadrough/simkit/profile.hpp"
#include "roadrough/simkit/quarter_car.hpp"
#include "roadrough/simkit/route.hpp"
#include "roadrough/simkit/telemetry.hpp"

#include "support/oracles.hpp"

using namespace roadrough;
using namespace roadrough::simkit;

namespace {

RoadProfile flat(double length, double dx = 0.25, double level = 0.0)
{
    RoadProfile p;
    p.dx = dx;
    p.elevation.assign(static_cast<std::size_t>(length / dx) + 1, level);
    return p;
}

RoadProfile sinusoid(double length, double dx, double amp, double wavelength)
{
    RoadProfile p;
    p.dx = dx;
    const auto n = static_cast<std::size_t>(length / dx) + 1;
    for (std::size_t i = 0; i < n; ++i)
        p.elevation.push_back(amp * std::sin(2 * std::numbers::pi * dx * double(i) / wavelength));
    return p;
}

// Least-squares slope of log10 periodogram density vs log10 frequency.
double periodogram_slope(const std::vector<RoadProfile>& profiles, double f_lo, double f_hi, int bins)
{
    std::vector<double> density(bins, 0.0);
    std::vector<int> counts(bins, 0);
    for (const auto& p : profiles) {
        const std::size_t n = p.elevation.size();
        const double len = p.dx * double(n);
        for (std::size_t k = 1; k < n / 2; ++k) {
            const double f = double(k) / len;
            if (f < f_lo || f >= f_hi) continue;
            const int b = int(std::log(f / f_lo) / std::log(f_hi / f_lo) * bins);
            std::complex<double> acc = 0;
            const double w = -2 * std::numbers::pi * double(k) / double(n);
            for (std::size_t i = 0; i < n; ++i) acc += p.elevation[i] * std::polar(1.0, w * double(i));
            density[b] += std::norm(acc);
            counts[b] += 1;
        }
    }
    std::vector<double> lx, ly;
    for (int b = 0; b < bins; ++b) {
        if (!counts[b]) continue;
        const double fc = f_lo * std::pow(f_hi / f_lo, (b + 0.5) / bins);
        lx.push_back(std::log10(fc));
        ly.push_back(std::log10(density[b] / counts[b]));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= double(lx.size());
    my /= double(ly.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

} // namespace

TEST(GenerateProfile, ZeroCoefficientIsFlat)
{
    auto p = generate_profile(200, 0.25, 0.0, 1);
    ASSERT_EQ(p.elevation.size(), 801u);
    for (double e : p.elevation) EXPECT_EQ(e, 0.0);
}

TEST(GenerateProfile, DeterministicPerSeed)
{
    auto a = generate_profile(300, 0.25, 64e-6, 42);
    auto b = generate_profile(300, 0.25, 64e-6, 42);
    auto c = generate_profile(300, 0.25, 64e-6, 43);
    EXPECT_EQ(a.elevation, b.elevation);
    EXPECT_NE(a.elevation, c.elevation);
    double mean = 0;
    for (double e : a.elevation) mean += e;
    EXPECT_NEAR(mean / double(a.elevation.size()), 0.0, 1e-12);
}

TEST(GenerateProfile, InvalidStep)
{
    EXPECT_THROW(generate_profile(100, 0.0, 1e-6, 1), InvalidInput);
    EXPECT_THROW(generate_profile(100, -0.25, 1e-6, 1), InvalidInput);
}

TEST(GenerateProfile, PeriodogramSlopeIsMinusTwo)
{
    std::vector<RoadProfile> ps;
    for (std::uint64_t seed = 0; seed < 10; ++seed) ps.push_back(generate_profile(1000, 0.25, 64e-6, 100 + seed));
    const double slope = periodogram_slope(ps, 0.05, 1.0, 16);
    EXPECT_NEAR(slope, -2.0, 0.3);
}

TEST(QuarterCar, FlatProfileGivesNoResponse)
{
    auto r = quarter_car_response(flat(50, 0.25, 0.3), 20.0, QuarterCarParams::golden_car(), 0.005);
    for (std::size_t k = 0; k < r.size(); ++k) {
        EXPECT_NEAR(r.acc_s[k], 0.0, 1e-10);
        EXPECT_NEAR(r.v_s[k], 0.0, 1e-10);
        EXPECT_NEAR(r.z_s[k], 0.3, 1e-10);
    }
}

TEST(QuarterCar, Linearity)
{
    auto p = generate_profile(100, 0.25, 64e-6, 5);
    const auto base = quarter_car_response(p, 20.0, QuarterCarParams::golden_car(), 0.004);
    const auto scaled = quarter_car_response(p.scaled(-3.0), 20.0, QuarterCarParams::golden_car(), 0.004);
    ASSERT_EQ(base.size(), scaled.size());
    for (std::size_t k = 0; k < base.size(); ++k) {
        EXPECT_NEAR(scaled.acc_s[k], -3.0 * base.acc_s[k], 1e-9 * (1 + std::abs(base.acc_s[k])));
        EXPECT_NEAR(scaled.z_u[k], -3.0 * base.z_u[k], 1e-12);
    }
}

TEST(QuarterCar, SinusoidMatchesTransferFunction)
{
    const auto params = QuarterCarParams::golden_car();
    for (double wavelength : {2.0, 5.0, 15.0}) {
        const double speed = 15.0;
        auto p = sinusoid(300, 0.02, 0.01, wavelength);
        auto r = quarter_car_response(p, speed, params, 0.001);
        // Skip the start-up transient.
        double peak = 0.0;
        for (std::size_t k = r.size() / 2; k < r.size(); ++k) peak = std::max(peak, std::abs(r.acc_s[k]));
        const double w = 2 * std::numbers::pi * speed / wavelength;
        const double expected = 0.01 * test::sprung_accel_gain(params, w);
        EXPECT_NEAR(peak, expected, 0.01 * expected) << "wavelength " << wavelength;
    }
}

TEST(QuarterCar, UndampedEnergyConserved)
{
    auto params = QuarterCarParams::golden_car();
    params.c = 0.0;
    const QuarterCarStepper stepper(params, 0.001);
    QuarterCarState x{0.02, 0.0, -0.005, 0.1};
    const double e0 = stepper.energy(x);
    for (int k = 0; k < 10000; ++k) x = stepper.step(x, 0.0, 0.0);
    EXPECT_NEAR(stepper.energy(x), e0, 1e-3 * e0);
}

TEST(QuarterCar, RejectsBadInput)
{
    auto p = flat(20);
    p.elevation[5] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(quarter_car_response(p, 20, QuarterCarParams::golden_car(), 0.005), InvalidInput);
    EXPECT_THROW(quarter_car_response(flat(20), 0.0, QuarterCarParams::golden_car(), 0.005), InvalidInput);
    EXPECT_THROW(quarter_car_response(flat(20), 10.0, QuarterCarParams::golden_car(), 0.01), InvalidInput);
}

TEST(ComputeIri, FlatIsZero)
{
    EXPECT_NEAR(compute_iri(flat(100)), 0.0, 1e-9);
    EXPECT_NEAR(compute_iri(flat(100, 0.25, 2.0)), 0.0, 1e-9);
}

TEST(ComputeIri, PositivelyHomogeneous)
{
    auto p = generate_profile(200, 0.25, 64e-6, 9);
    const double base = compute_iri(p);
    ASSERT_GT(base, 0.0);
    for (double alpha : {0.5, 2.0}) EXPECT_NEAR(compute_iri(p.scaled(alpha)), alpha * base, 1e-6 * alpha * base);
}

TEST(ComputeIri, MatchesFineStepOracle)
{
    auto p = generate_profile(200, 0.25, 64e-6, 2024);
    const double iri = compute_iri(p);
    const double oracle = test::rk4_iri(p, QuarterCarParams::golden_car(), kIriSpeed, 1e-4);
    EXPECT_NEAR(iri, oracle, 0.005 * oracle);
}

TEST(ComputeIri, StepHalvingIsStable)
{
    auto p = generate_profile(300, 0.25, 64e-6, 77);
    const auto gc = QuarterCarParams::golden_car();
    const double coarse = compute_iri(p, gc, kIriSpeed, 0.005);
    const double fine = compute_iri(p, gc, kIriSpeed, 0.0025);
    EXPECT_LT(std::abs(coarse - fine), 1e-3 * fine);
}

TEST(ComputeIri, TooShort)
{
    EXPECT_THROW(compute_iri(flat(9.5)), InvalidInput);
}

TEST(ComputeIri, RuntimePerKilometre)
{
    auto p = generate_profile(1000, 0.25, 64e-6, 3);
    const auto t0 = std::chrono::steady_clock::now();
    const double iri = compute_iri(p);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_GT(iri, 0.0);
    EXPECT_LT(secs, 1.0);
}

TEST(ReferenceSegments, CountsTilingAndFlat)
{
    const auto route = make_route({55.7, 12.5}, 100.0, 1);
    auto segs = build_reference_segments(flat(100), route, 10.0);
    ASSERT_EQ(segs.size(), 10u);
    for (std::size_t i = 0; i < segs.size(); ++i) {
        EXPECT_NEAR(segs[i].iri, 0.0, 1e-12);
        EXPECT_DOUBLE_EQ(segs[i].length, 10.0);
        if (i) EXPECT_EQ(segs[i].start, segs[i - 1].end);
    }
    EXPECT_EQ(segs.front().start, route.points().front());
    EXPECT_NEAR(great_circle_m(segs.back().end, route.points().back()), 0.0, 1e-6);
}

TEST(ReferenceSegments, MeanMatchesWholeProfileIri)
{
    auto p = generate_profile(500, 0.25, 64e-6, 21);
    const auto route = make_route({55.7, 12.5}, 500.0, 2);
    auto segs = build_reference_segments(p, route, 10.0);
    ASSERT_EQ(segs.size(), 50u);
    double mean = 0;
    for (const auto& s : segs) mean += s.iri / double(segs.size());
    EXPECT_NEAR(mean, compute_iri(p), 1e-3 * mean);
}

TEST(Telemetry, NoiselessGpsOnRoute)
{
    const auto route = make_route({55.7, 12.5}, 400.0, 3);
    auto p = generate_profile(400, 0.25, 64e-6, 4);
    SimConfig cfg;
    cfg.speed_profile = SpeedProfile::constant(20.0);
    auto trace = synthesize_telemetry(p, route, cfg);
    int fixes = 0;
    for (const auto& s : trace) {
        if (!s.gps) continue;
        ++fixes;
        const GeoPoint expected = route.at(20.0 * s.t * route.length() / p.length());
        EXPECT_LT(great_circle_m(*s.gps, expected), 1e-6);
    }
    EXPECT_EQ(fixes, 20);
    // 20 s at 50 Hz.
    EXPECT_NEAR(double(trace.size()), 20.0 * 50.0, 1.0);
    for (const auto& s : trace) EXPECT_DOUBLE_EQ(s.speed, 20.0);
}

TEST(Telemetry, GpsNoiseRmsMatchesSigma)
{
    const auto route = make_route({55.7, 12.5}, 2500.0, 5);
    auto p = generate_profile(2500, 0.25, 16e-6, 6);
    SimConfig cfg;
    cfg.speed_profile = SpeedProfile::constant(2.0);
    cfg.gps_noise_sigma = 3.0;
    cfg.acc_rate = 10.0;
    cfg.seed = 99;
    auto trace = synthesize_telemetry(p, route, cfg);
    double sq = 0;
    int n = 0;
    for (const auto& s : trace) {
        if (!s.gps) continue;
        const GeoPoint truth = route.at(2.0 * s.t * route.length() / p.length());
        const double d = great_circle_m(*s.gps, truth);
        sq += d * d;
        ++n;
    }
    ASSERT_GE(n, 1000);
    EXPECT_NEAR(std::sqrt(sq / n), 3.0, 0.15);
}

TEST(Telemetry, DeterministicAndNoisy)
{
    const auto route = make_route({55.7, 12.5}, 300.0, 3);
    auto p = generate_profile(300, 0.25, 64e-6, 4);
    SimConfig cfg;
    cfg.speed_profile = random_speed_profile(300, 100, 15, 25, 8);
    cfg.acc_noise_sigma = 0.03;
    cfg.gps_noise_sigma = 3.0;
    cfg.seed = 12;
    auto a = synthesize_telemetry(p, route, cfg);
    auto b = synthesize_telemetry(p, route, cfg);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].acc_z, b[i].acc_z);
        EXPECT_EQ(a[i].gps.has_value(), b[i].gps.has_value());
        if (a[i].gps) EXPECT_EQ(*a[i].gps, *b[i].gps);
    }
    EXPECT_NO_THROW(validate_trace(a));
}

TEST(Telemetry, LengthMismatch)
{
    const auto route = make_route({55.7, 12.5}, 300.0, 3);
    auto p = generate_profile(200, 0.25, 64e-6, 4);
    EXPECT_THROW(synthesize_telemetry(p, route, SimConfig{}), InvalidInput);
}
