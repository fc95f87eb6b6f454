#pragma once

#include <cmath>
#include <string>

#include "roadrough/models/model.hpp"

namespace roadrough::models {

/// Train mean (regression) or most frequent class, lower class on ties.
class Baseline : public Model {
public:
    Baseline(Task task, Hyperparams hp = {}) : Model(task, std::move(hp)) {}
    std::string family() const override { return "baseline"; }
    double value() const { return value_; }

protected:
    void do_fit(const Eigen::MatrixXd&, const Eigen::VectorXd& y) override
    {
        if (task_ == Task::Regression) {
            value_ = y.mean();
            return;
        }
        std::vector<double> counts(static_cast<std::size_t>(detail::num_classes(y)), 0.0);
        for (Eigen::Index i = 0; i < y.size(); ++i) counts[static_cast<std::size_t>(y(i))] += 1.0;
        value_ = detail::argmax(counts);
    }

    Eigen::VectorXd do_predict(const Eigen::MatrixXd& X) const override
    {
        return Eigen::VectorXd::Constant(X.rows(), value_);
    }

    json state() const override { return {{"value", value_}}; }
    void load_state(const json& j) override { value_ = j.at("value").get<double>(); }

private:
    double value_ = 0.0;
};

enum class LinearKind { Ols, Ridge, Lasso, ElasticNet };

inline std::string linear_family_name(LinearKind k)
{
    switch (k) {
    case LinearKind::Ols: return "linear";
    case LinearKind::Ridge: return "ridge";
    case LinearKind::Lasso: return "lasso";
    case LinearKind::ElasticNet: return "elastic_net";
    }
    return "linear";
}

/// y = X theta + b with an unpenalised intercept.
///   ridge:       |y - X theta - b|^2 + alpha |theta|^2 (normal equations)
///   lasso / net: 1/(2N) |y - X theta - b|^2 + alpha l1 |theta|_1
///                + alpha (1 - l1) / 2 |theta|^2 (cyclic coordinate descent)
/// Hyperparams: alpha; l1_ratio (elastic_net).
class LinearModel : public Model {
public:
    LinearModel(LinearKind kind, Hyperparams hp = {}) : Model(Task::Regression, std::move(hp)), kind_(kind) {}

    std::string family() const override { return linear_family_name(kind_); }
    const Eigen::VectorXd& coef() const { return theta_; }
    double intercept() const { return b_; }
    std::size_t sweeps() const { return sweeps_; }

    static constexpr double kTol = 1e-6;
    static constexpr std::size_t kMaxSweeps = 10000;

protected:
    void do_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) override
    {
        const Eigen::RowVectorXd xm = X.colwise().mean();
        const double ym = y.mean();
        const Eigen::MatrixXd Xc = X.rowwise() - xm;
        const Eigen::VectorXd yc = y.array() - ym;
        switch (kind_) {
        case LinearKind::Ols: solve_normal(Xc, yc, 0.0); break;
        case LinearKind::Ridge: {
            const double alpha = hp_.number("alpha");
            detail::require(alpha >= 0, "ridge: alpha must be >= 0");
            solve_normal(Xc, yc, alpha);
            break;
        }
        case LinearKind::Lasso: coordinate_descent(Xc, yc, hp_.number("alpha"), 1.0); break;
        case LinearKind::ElasticNet:
            coordinate_descent(Xc, yc, hp_.number("alpha"), hp_.number("l1_ratio"));
            break;
        }
        b_ = ym - xm.dot(theta_);
    }

    Eigen::VectorXd do_predict(const Eigen::MatrixXd& X) const override
    {
        return (X * theta_).array() + b_;
    }

    json state() const override { return {{"coef", detail::to_json(theta_)}, {"intercept", b_}}; }

    void load_state(const json& j) override
    {
        theta_ = detail::vector_from_json(j.at("coef"));
        b_ = j.at("intercept").get<double>();
    }

private:
    void solve_normal(const Eigen::MatrixXd& Xc, const Eigen::VectorXd& yc, double alpha)
    {
        const Eigen::Index d = Xc.cols();
        Eigen::MatrixXd A = Xc.transpose() * Xc;
        A.diagonal().array() += alpha;
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
        const double scale = std::max(1.0, A.diagonal().cwiseAbs().maxCoeff());
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
            ldlt.vectorD().minCoeff() <= 1e-12 * scale)
            throw InvalidInput(family() + ": normal equations are singular (collinear features); use ridge");
        theta_ = ldlt.solve(Xc.transpose() * yc);
        if (theta_.size() != d || !theta_.allFinite())
            throw InvalidInput(family() + ": normal equations are singular (collinear features); use ridge");
    }

    void coordinate_descent(const Eigen::MatrixXd& Xc, const Eigen::VectorXd& yc, double alpha, double l1_ratio)
    {
        detail::require(alpha >= 0, family() + ": alpha must be >= 0");
        detail::require(l1_ratio >= 0 && l1_ratio <= 1, family() + ": l1_ratio must be in [0, 1]");
        const double n = static_cast<double>(Xc.rows());
        const Eigen::Index d = Xc.cols();
        const double l1 = alpha * l1_ratio;
        const double l2 = alpha * (1.0 - l1_ratio);
        const Eigen::VectorXd sq = Xc.colwise().squaredNorm().transpose() / n;
        theta_ = Eigen::VectorXd::Zero(d);
        Eigen::VectorXd r = yc;
        for (sweeps_ = 1; sweeps_ <= kMaxSweeps; ++sweeps_) {
            double max_change = 0.0;
            for (Eigen::Index j = 0; j < d; ++j) {
                if (sq(j) <= 0) continue;
                const double old = theta_(j);
                const double rho = Xc.col(j).dot(r) / n + sq(j) * old;
                const double mag = std::max(std::abs(rho) - l1, 0.0);
                const double nw = std::copysign(mag, rho) / (sq(j) + l2);
                if (nw != old) {
                    r -= (nw - old) * Xc.col(j);
                    theta_(j) = nw;
                    max_change = std::max(max_change, std::abs(nw - old));
                }
            }
            if (max_change < kTol) break;
        }
    }

    LinearKind kind_;
    Eigen::VectorXd theta_;
    double b_ = 0.0;
    std::size_t sweeps_ = 0;
};

} // namespace roadrough::models
