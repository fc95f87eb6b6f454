#pragma once

// Reference solvers for the model tests. Deliberately plain and slow.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace test {

/// Central differences of f at x.
inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double h = 1e-5)
{
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        xp(i) = x(i) + h;
        const double fp = f(xp);
        xp(i) = x(i) - h;
        const double fm = f(xp);
        xp(i) = x(i);
        g(i) = (fp - fm) / (2 * h);
    }
    return g;
}

/// max_i |a_i - b_i| / max(|a|_inf, |b|_inf)
inline double max_rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    const double scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), 1e-300});
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

/// Lasso / elastic net by proximal subgradient steps (ISTA) on
///   1/(2N)|y - X w - b|^2 + a l1 |w|_1 + a (1 - l1)/2 |w|^2,
/// intercept handled as an unpenalised coordinate.
inline std::pair<Eigen::VectorXd, double> ista_elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                                           double alpha, double l1_ratio, int iters)
{
    const double n = static_cast<double>(X.rows());
    Eigen::MatrixXd A(X.rows(), X.cols() + 1);
    A << X, Eigen::VectorXd::Ones(X.rows());
    // Step 1/L with L the largest eigenvalue of A'A/N plus the ridge part.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.transpose() * A / n);
    const double L = es.eigenvalues().maxCoeff() + alpha * (1 - l1_ratio);
    const double t = 1.0 / L;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(A.cols());
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd g = A.transpose() * (A * w - y) / n;
        g.head(X.cols()) += alpha * (1 - l1_ratio) * w.head(X.cols());
        Eigen::VectorXd z = w - t * g;
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const double thr = t * alpha * l1_ratio;
            z(j) = z(j) > thr ? z(j) - thr : (z(j) < -thr ? z(j) + thr : 0.0);
        }
        w = z;
    }
    return {w.head(X.cols()), w(X.cols())};
}

/// Sum of squared deviations from the mean.
inline double sse(const std::vector<double>& v)
{
    if (v.empty()) return 0.0;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s;
}

struct OracleSplit {
    bool ok = false;
    int feature = -1;
    double threshold = 0.0;
};

/// Best regression split of `rows` by trying every feature and every midpoint.
inline OracleSplit exhaustive_split(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& rows)
{
    OracleSplit best;
    std::vector<double> all;
    for (int r : rows) all.push_back(y(r));
    const double parent = sse(all);
    double best_gain = 1e-12 * static_cast<double>(rows.size());
    for (int f = 0; f < X.cols(); ++f) {
        std::vector<double> vals;
        for (int r : rows) vals.push_back(X(r, f));
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
            const double thr = 0.5 * (vals[i] + vals[i + 1]);
            std::vector<double> l, rr;
            for (int r : rows) (X(r, f) <= thr ? l : rr).push_back(y(r));
            const double gain = parent - sse(l) - sse(rr);
            if (gain > best_gain + 1e-10 * std::abs(best_gain)) {
                best_gain = gain;
                best = {true, f, thr};
            }
        }
    }
    return best;
}

/// Projected gradient on the SVR dual in (a, a*) form:
///   min 1/2 (a - a*)' K (a - a*) + eps sum(a + a*) - y'(a - a*)
///   s.t. sum(a - a*) = 0, 0 <= a, a* <= C.
/// The projection onto box-and-hyperplane bisects on the multiplier.
inline double svr_dual_projected_gradient(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double C, double eps,
                                          int iters)
{
    const Eigen::Index n = y.size();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * n); // [a; a*]
    Eigen::VectorXd s(2 * n);
    s << Eigen::VectorXd::Ones(n), -Eigen::VectorXd::Ones(n);
    auto objective = [&](const Eigen::VectorXd& z) {
        const Eigen::VectorXd d = z.head(n) - z.tail(n);
        return 0.5 * d.dot(K * d) + eps * z.sum() - y.dot(d);
    };
    auto project = [&](const Eigen::VectorXd& z) {
        auto at = [&](double mu) { return (z - mu * s).cwiseMax(0.0).cwiseMin(C); };
        double lo = -1e6, hi = 1e6;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (s.dot(at(mid)) > 0) lo = mid;
            else hi = mid;
        }
        return Eigen::VectorXd(at(0.5 * (lo + hi)));
    };
    const double L = 2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(K).eigenvalues().maxCoeff();
    const double t = 1.0 / L;
    for (int it = 0; it < iters; ++it) {
        const Eigen::VectorXd d = v.head(n) - v.tail(n);
        const Eigen::VectorXd kd = K * d;
        Eigen::VectorXd g(2 * n);
        g.head(n) = kd.array() + eps - y.array();
        g.tail(n) = -kd.array() + eps + y.array();
        v = project(v - t * g);
    }
    return objective(v);
}

} // namespace test
