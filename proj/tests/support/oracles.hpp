#pragma once

// Test-only reference computations, kept independent of the library code paths
// they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "roadrough/simkit/profile.hpp"
#include "roadrough/simkit/quarter_car.hpp"

namespace test {

using roadrough::simkit::QuarterCarParams;
using roadrough::simkit::RoadProfile;

/// Sprung-mass acceleration amplitude per unit road amplitude at angular
/// frequency w, from the frequency-domain equations of motion.
inline double sprung_accel_gain(const QuarterCarParams& p, double w)
{
    using C = std::complex<double>;
    const C iw(0.0, w);
    // [ -w^2 + iw c + k2        -(iw c + k2)                ] [Zs]   [ 0    ]
    // [ -(iw c + k2)      mu(-w^2) + iw c + k2 + k1         ] [Zu] = [ k1 Y ]
    const C a11 = -w * w + iw * p.c + p.k2;
    const C a12 = -(iw * p.c + p.k2);
    const C a22 = p.mu * (-w * w) + iw * p.c + p.k2 + p.k1;
    const C det = a11 * a22 - a12 * a12;
    const C zs = -a12 * p.k1 / det;
    return std::abs(-w * w * zs);
}

/// IRI by classical RK4 with linearly interpolated road input.
inline double rk4_iri(const RoadProfile& prof, const QuarterCarParams& p, double speed, double dt)
{
    using V = Eigen::Vector4d;
    auto road = [&](double t) { return prof.at(speed * t); };
    auto f = [&](double t, const V& x) {
        const double y = road(t);
        V d;
        d(0) = x(1);
        d(1) = -p.k2 * (x(0) - x(2)) - p.c * (x(1) - x(3));
        d(2) = x(3);
        d(3) = (p.k2 * (x(0) - x(2)) + p.c * (x(1) - x(3)) - p.k1 * (x(2) - y)) / p.mu;
        return d;
    };
    const double total = prof.length() / speed;
    const auto steps = static_cast<std::size_t>(std::floor(total / dt));
    V x(prof.elevation.front(), 0.0, prof.elevation.front(), 0.0);
    double travel = 0.0;
    double prev = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = dt * double(k);
        const V k1 = f(t, x);
        const V k2 = f(t + dt / 2, x + dt / 2 * k1);
        const V k3 = f(t + dt / 2, x + dt / 2 * k2);
        const V k4 = f(t + dt, x + dt * k3);
        x += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        const double cur = std::abs(x(1) - x(3));
        travel += 0.5 * dt * (prev + cur);
        prev = cur;
    }
    return 1000.0 * travel / (speed * dt * double(steps));
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
inline Eigen::VectorXd jacobi_eigenvalues(Eigen::MatrixXd a)
{
    const Eigen::Index n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    Eigen::VectorXd ev = a.diagonal();
    std::sort(ev.data(), ev.data() + n, std::greater<>());
    return ev;
}

} // namespace test
