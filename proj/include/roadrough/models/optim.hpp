#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "roadrough/core/error.hpp"

namespace roadrough::models {

/// Smooth objective: returns f(x) and writes grad f(x) into g.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& g)>;

struct DescentOptions {
    double grad_tol = 1e-6;
    std::size_t max_iter = 50000;
    bool accelerate = true;
};

struct DescentResult {
    Eigen::VectorXd x;
    double loss = 0.0;
    double grad_norm = 0.0;
    std::size_t iterations = 0;
    std::vector<double> history; // loss at every accepted iterate
};

/// Nesterov gradient descent with backtracking on the step size. A step that
/// would raise the loss drops the momentum and is retaken as a plain gradient
/// step, so the recorded losses never increase.
inline DescentResult gradient_descent(const Objective& f, Eigen::VectorXd x0, const DescentOptions& opt = {})
{
    DescentResult r;
    Eigen::VectorXd gx(x0.size()), gy(x0.size()), gtmp(x0.size());
    double fx = f(x0, gx);
    r.history.push_back(fx);
    Eigen::VectorXd x = std::move(x0);
    Eigen::VectorXd x_prev = x;
    double step = 1.0;
    double theta = 1.0;

    // Backtracked step from y (with f(y), g(y) known); returns the new point.
    auto prox_step = [&](const Eigen::VectorXd& y, double fy, const Eigen::VectorXd& g, Eigen::VectorXd& out) {
        const double gg = g.squaredNorm();
        step *= 2.0;
        for (int tries = 0; tries < 80; ++tries) {
            out = y - step * g;
            const double fo = f(out, gtmp);
            if (std::isfinite(fo) && fo <= fy - 0.5 * step * gg) return;
            step *= 0.5;
        }
        out = y;
    };

    Eigen::VectorXd cand(x.size());
    for (r.iterations = 0; r.iterations < opt.max_iter; ++r.iterations) {
        r.grad_norm = gx.norm();
        if (r.grad_norm <= opt.grad_tol) break;

        bool plain = !opt.accelerate;
        if (!plain) {
            const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
            const Eigen::VectorXd y = x + ((theta - 1.0) / theta_next) * (x - x_prev);
            const double fy = f(y, gy);
            prox_step(y, fy, gy, cand);
            Eigen::VectorXd gc(x.size());
            const double fc = f(cand, gc);
            if (std::isfinite(fc) && fc <= fx) {
                x_prev = x;
                x = cand;
                fx = fc;
                gx = gc;
                theta = theta_next;
            } else {
                plain = true;
            }
        }
        if (plain) {
            theta = 1.0;
            prox_step(x, fx, gx, cand);
            x_prev = x;
            x = cand;
            fx = f(x, gx);
        }
        if (!std::isfinite(fx)) throw ConvergenceError("gradient descent: loss became non-finite");
        r.history.push_back(fx);
    }
    r.grad_norm = gx.norm();
    r.x = std::move(x);
    r.loss = fx;
    return r;
}

} // namespace roadrough::models
