#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "roadrough/core/error.hpp"
#include "roadrough/simkit/profile.hpp"

namespace roadrough::simkit {

/// Linear two-mass vehicle model, rates normalized by the sprung mass.
struct QuarterCarParams {
    double k1 = 653.0; // tire spring, 1/s^2
    double k2 = 63.3;  // suspension spring, 1/s^2
    double c = 6.0;    // suspension damping, 1/s
    double mu = 0.15;  // unsprung / sprung mass ratio

    void validate(bool allow_zero_damping = false) const
    {
        roadrough::detail::require(k1 > 0 && k2 > 0 && mu > 0 && (c > 0 || (allow_zero_damping && c == 0)),
                                   "quarter-car parameters must be strictly positive");
    }

    /// Reference vehicle of the IRI standard.
    static QuarterCarParams golden_car() { return {}; }

    QuarterCarParams perturbed(double fk1, double fk2, double fc, double fmu) const
    {
        return {k1 * fk1, k2 * fk2, c * fc, mu * fmu};
    }
};

/// State order: sprung displacement, sprung velocity, unsprung displacement, unsprung velocity.
using QuarterCarState = Eigen::Vector4d;

inline Eigen::Matrix4d system_matrix(const QuarterCarParams& p)
{
    Eigen::Matrix4d a;
    a << 0, 1, 0, 0,                                   //
        -p.k2, -p.c, p.k2, p.c,                        //
        0, 0, 0, 1,                                    //
        p.k2 / p.mu, p.c / p.mu, -(p.k1 + p.k2) / p.mu, -p.c / p.mu;
    return a;
}

inline Eigen::Vector4d input_vector(const QuarterCarParams& p) { return {0.0, 0.0, 0.0, p.k1 / p.mu}; }

/// Exact discrete-time stepping over a fixed dt with the road input linear
/// within each step (first-order hold).
class QuarterCarStepper {
public:
    QuarterCarStepper(const QuarterCarParams& params, double dt) : params_(params), dt_(dt)
    {
        params.validate(true);
        roadrough::detail::require(dt > 0 && std::isfinite(dt), "quarter-car: dt must be positive");
        Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
        m.topLeftCorner<4, 4>() = system_matrix(params);
        m.block<4, 1>(0, 4) = input_vector(params);
        m(4, 5) = 1.0;
        const Eigen::Matrix<double, 6, 6> e = (m * dt).exp();
        phi_ = e.topLeftCorner<4, 4>();
        gamma_hold_ = e.block<4, 1>(0, 4);
        gamma_ramp_ = e.block<4, 1>(0, 5);
        accel_row_ = system_matrix(params).row(1);
    }

    /// Advance one step with road elevation going from y0 to y1.
    QuarterCarState step(const QuarterCarState& x, double y0, double y1) const
    {
        return phi_ * x + gamma_hold_ * y0 + gamma_ramp_ * ((y1 - y0) / dt_);
    }

    /// Vertical acceleration of the sprung mass.
    double sprung_accel(const QuarterCarState& x) const { return accel_row_.dot(x); }

    /// Mechanical energy per unit sprung mass for road input y.
    double energy(const QuarterCarState& x, double y = 0.0) const
    {
        const double rel = x(0) - x(2);
        const double tire = x(2) - y;
        return 0.5 * x(1) * x(1) + 0.5 * params_.mu * x(3) * x(3) + 0.5 * params_.k2 * rel * rel +
               0.5 * params_.k1 * tire * tire;
    }

    double dt() const { return dt_; }
    const QuarterCarParams& params() const { return params_; }

    /// Vehicle at rest on elevation y.
    static QuarterCarState at_rest(double y) { return {y, 0.0, y, 0.0}; }

private:
    QuarterCarParams params_;
    double dt_;
    Eigen::Matrix4d phi_;
    Eigen::Vector4d gamma_hold_;
    Eigen::Vector4d gamma_ramp_;
    Eigen::RowVector4d accel_row_;
};

struct QuarterCarResponse {
    double dt = 0.0;
    std::vector<double> z_s;
    std::vector<double> z_u;
    std::vector<double> v_s;
    std::vector<double> v_u;
    std::vector<double> acc_s;

    std::size_t size() const { return z_s.size(); }
};

/// Response of the quarter-car driven over `profile` at constant speed, sampled
/// every dt from t = 0 until the end of the profile. Starts at rest on the
/// first elevation.
inline QuarterCarResponse quarter_car_response(const RoadProfile& profile, double speed,
                                               const QuarterCarParams& params, double dt)
{
    profile.validate();
    roadrough::detail::require(speed > 0 && std::isfinite(speed), "quarter_car_response: speed must be > 0");
    roadrough::detail::require(dt > 0 && dt <= 0.005 + 1e-15, "quarter_car_response: dt must be in (0, 0.005] s");
    const QuarterCarStepper stepper(params, dt);
    const double duration = profile.length() / speed;
    const auto steps = static_cast<std::size_t>(std::floor(duration / dt + 1e-9));

    QuarterCarResponse r;
    r.dt = dt;
    for (auto* v : {&r.z_s, &r.z_u, &r.v_s, &r.v_u, &r.acc_s}) v->reserve(steps + 1);
    QuarterCarState x = QuarterCarStepper::at_rest(profile.elevation.front());
    double y_prev = profile.at(0.0);
    auto record = [&] {
        r.z_s.push_back(x(0));
        r.v_s.push_back(x(1));
        r.z_u.push_back(x(2));
        r.v_u.push_back(x(3));
        r.acc_s.push_back(stepper.sprung_accel(x));
    };
    record();
    for (std::size_t k = 1; k <= steps; ++k) {
        const double y = profile.at(speed * dt * static_cast<double>(k));
        x = stepper.step(x, y_prev, y);
        y_prev = y;
        record();
    }
    return r;
}

} // namespace roadrough::simkit
