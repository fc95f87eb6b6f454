#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "roadrough/models/model.hpp"

namespace roadrough::models {

/// Gaussian naive Bayes. Priors are class frequencies; per-class, per-feature
/// variances are floored at kVarFloor. A label absent from training keeps a
/// zero prior and is never predicted.
class GaussianNaiveBayes : public Model {
public:
    explicit GaussianNaiveBayes(Hyperparams hp = {}) : Model(Task::Classification, std::move(hp)) {}

    static constexpr double kVarFloor = 1e-9;

    std::string family() const override { return "naive_bayes"; }

    /// Unnormalised log posterior, rows x classes.
    Eigen::MatrixXd joint_log_likelihood(const Eigen::MatrixXd& X) const
    {
        const Eigen::Index k = mean_.rows();
        Eigen::MatrixXd L(X.rows(), k);
        for (Eigen::Index c = 0; c < k; ++c) {
            if (log_prior_(c) == -std::numeric_limits<double>::infinity()) {
                L.col(c).setConstant(-std::numeric_limits<double>::infinity());
                continue;
            }
            const double norm = -0.5 * (2.0 * std::numbers::pi * var_.row(c).array()).log().sum();
            const Eigen::MatrixXd diff = X.rowwise() - mean_.row(c);
            L.col(c) = ((diff.array().square().rowwise() / var_.row(c).array()).rowwise().sum() * -0.5 + norm +
                        log_prior_(c))
                           .matrix();
        }
        return L;
    }

    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const
    {
        detail::require(fitted(), "naive_bayes: predict before fit");
        const Eigen::MatrixXd L = joint_log_likelihood(X);
        Eigen::MatrixXd P = (L.colwise() - L.rowwise().maxCoeff()).array().exp();
        P.array().colwise() /= P.rowwise().sum().array();
        return P;
    }

    const Eigen::MatrixXd& means() const { return mean_; }
    const Eigen::MatrixXd& variances() const { return var_; }

protected:
    void do_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) override
    {
        const int k = detail::num_classes(y);
        const Eigen::Index d = X.cols();
        mean_ = Eigen::MatrixXd::Zero(k, d);
        var_ = Eigen::MatrixXd::Constant(k, d, 1.0);
        log_prior_ = Eigen::VectorXd::Constant(k, -std::numeric_limits<double>::infinity());
        Eigen::VectorXd count = Eigen::VectorXd::Zero(k);
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            const auto c = static_cast<Eigen::Index>(y(i));
            count(c) += 1.0;
            mean_.row(c) += X.row(i);
        }
        for (Eigen::Index c = 0; c < k; ++c)
            if (count(c) > 0) mean_.row(c) /= count(c);
        Eigen::MatrixXd ss = Eigen::MatrixXd::Zero(k, d);
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            const auto c = static_cast<Eigen::Index>(y(i));
            ss.row(c) += (X.row(i) - mean_.row(c)).array().square().matrix();
        }
        const double n = static_cast<double>(X.rows());
        for (Eigen::Index c = 0; c < k; ++c) {
            if (count(c) == 0) continue;
            var_.row(c) = (ss.row(c) / count(c)).cwiseMax(kVarFloor);
            log_prior_(c) = std::log(count(c) / n);
        }
    }

    Eigen::VectorXd do_predict(const Eigen::MatrixXd& X) const override
    {
        const Eigen::MatrixXd L = joint_log_likelihood(X);
        Eigen::VectorXd out(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            Eigen::Index best = 0;
            for (Eigen::Index c = 1; c < L.cols(); ++c)
                if (L(i, c) > L(i, best)) best = c;
            out(i) = static_cast<double>(best);
        }
        return out;
    }

    json state() const override
    {
        json lp = json::array();
        for (Eigen::Index c = 0; c < log_prior_.size(); ++c)
            lp.push_back(std::isfinite(log_prior_(c)) ? json(log_prior_(c)) : json(nullptr)); // null: absent class
        return {{"log_prior", lp}, {"mean", detail::to_json(mean_)}, {"var", detail::to_json(var_)}};
    }

    void load_state(const json& j) override
    {
        const auto& lp = j.at("log_prior");
        log_prior_.resize(static_cast<Eigen::Index>(lp.size()));
        for (std::size_t c = 0; c < lp.size(); ++c)
            log_prior_(static_cast<Eigen::Index>(c)) =
                lp[c].is_null() ? -std::numeric_limits<double>::infinity() : lp[c].get<double>();
        mean_ = detail::matrix_from_json(j.at("mean"));
        var_ = detail::matrix_from_json(j.at("var"));
    }

private:
    Eigen::VectorXd log_prior_;
    Eigen::MatrixXd mean_; // K x d
    Eigen::MatrixXd var_;  // K x d
};

} // namespace roadrough::models
