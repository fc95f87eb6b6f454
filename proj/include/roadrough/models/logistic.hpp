#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "roadrough/models/model.hpp"
#include "roadrough/models/optim.hpp"

namespace roadrough::models {

namespace detail {

/// Row-wise softmax, shifted by the row max.
inline Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& Z)
{
    Eigen::MatrixXd P = Z.colwise() - Z.rowwise().maxCoeff();
    P = P.array().exp();
    P.array().colwise() /= P.rowwise().sum().array();
    return P;
}

inline double log_sum_exp(const Eigen::RowVectorXd& z)
{
    const double m = z.maxCoeff();
    return m + std::log((z.array() - m).exp().sum());
}

inline Eigen::MatrixXd one_hot(const Eigen::VectorXd& y, int k)
{
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(y.size(), k);
    for (Eigen::Index i = 0; i < y.size(); ++i) Y(i, static_cast<Eigen::Index>(y(i))) = 1.0;
    return Y;
}

} // namespace detail

/// Multinomial cross-entropy with an L2 penalty on the weights (not the
/// intercepts). Parameters are the (d+1) x K matrix [W; b] flattened column-major.
///   f = (1/N) sum_i -log softmax(x_i W + b)_{y_i} + (lambda/2) |W|^2
inline double softmax_loss(const Eigen::VectorXd& params, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                           double lambda, Eigen::VectorXd& grad)
{
    const Eigen::Index d = X.cols();
    const Eigen::Index k = Y.cols();
    const double n = static_cast<double>(X.rows());
    const Eigen::Map<const Eigen::MatrixXd> P(params.data(), d + 1, k);
    const auto W = P.topRows(d);
    const Eigen::MatrixXd Z = (X * W).rowwise() + P.row(d);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < Z.rows(); ++i) loss += detail::log_sum_exp(Z.row(i)) - Z.row(i).dot(Y.row(i));
    loss = loss / n + 0.5 * lambda * W.squaredNorm();

    const Eigen::MatrixXd R = (detail::softmax_rows(Z) - Y) / n;
    grad.resize(params.size());
    Eigen::Map<Eigen::MatrixXd> G(grad.data(), d + 1, k);
    G.topRows(d) = X.transpose() * R + lambda * W;
    G.row(d) = R.colwise().sum();
    return loss;
}

/// L2-regularised logistic regression, multinomial by default.
/// Hyperparams: l2 (lambda above); multi_class = "multinomial" | "ovr";
/// optional max_iter.
class LogisticRegression : public Model {
public:
    explicit LogisticRegression(Hyperparams hp = {}) : Model(Task::Classification, std::move(hp)) {}

    std::string family() const override { return "logistic"; }

    bool one_vs_rest() const
    {
        const std::string mc = hp_.has("multi_class") ? hp_.choice("multi_class") : "multinomial";
        if (mc == "multinomial") return false;
        if (mc == "ovr") return true;
        throw InvalidInput("logistic: multi_class must be 'multinomial' or 'ovr'");
    }

    /// Class probabilities, rows summing to 1.
    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const
    {
        detail::require(fitted(), "logistic: predict before fit");
        detail::require(static_cast<std::size_t>(X.cols()) == n_features_, "logistic: feature count differs from training");
        const Eigen::MatrixXd Z = scores(X);
        if (!ovr_) return detail::softmax_rows(Z);
        Eigen::MatrixXd S = (1.0 + (-Z.array()).exp()).inverse().matrix();
        S.array().colwise() /= S.rowwise().sum().array();
        return S;
    }

    const std::vector<double>& loss_history() const { return history_; }
    double final_grad_norm() const { return grad_norm_; }

protected:
    void do_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) override
    {
        const double lambda = hp_.number("l2");
        detail::require(lambda >= 0, "logistic: l2 must be >= 0");
        ovr_ = one_vs_rest();
        const int k = detail::num_classes(y);
        const Eigen::Index d = X.cols();
        DescentOptions opt;
        opt.max_iter = static_cast<std::size_t>(hp_.number_or("max_iter", 50000));
        history_.clear();
        grad_norm_ = 0.0;

        auto run = [&](const Eigen::MatrixXd& Y, Eigen::Index cols) {
            const Objective f = [&](const Eigen::VectorXd& p, Eigen::VectorXd& g) {
                return softmax_loss(p, X, Y, lambda, g);
            };
            auto r = gradient_descent(f, Eigen::VectorXd::Zero((d + 1) * cols), opt);
            if (r.grad_norm > opt.grad_tol) {
                std::ostringstream os;
                os << "logistic: no convergence after " << r.iterations << " iterations (gradient norm "
                   << r.grad_norm << ")";
                throw ConvergenceError(os.str());
            }
            history_.insert(history_.end(), r.history.begin(), r.history.end());
            grad_norm_ = std::max(grad_norm_, r.grad_norm);
            return Eigen::MatrixXd(Eigen::Map<const Eigen::MatrixXd>(r.x.data(), d + 1, cols));
        };

        const Eigen::MatrixXd Y = detail::one_hot(y, k);
        if (!ovr_) {
            coef_ = run(Y, k);
            return;
        }
        // One binary softmax per class; score = logit of "class c" against "rest".
        coef_.resize(d + 1, k);
        for (int c = 0; c < k; ++c) {
            Eigen::MatrixXd Yc(Y.rows(), 2);
            Yc.col(0) = 1.0 - Y.col(c).array();
            Yc.col(1) = Y.col(c);
            const Eigen::MatrixXd Pc = run(Yc, 2);
            coef_.col(c) = Pc.col(1) - Pc.col(0);
        }
    }

    Eigen::VectorXd do_predict(const Eigen::MatrixXd& X) const override
    {
        const Eigen::MatrixXd Z = scores(X);
        Eigen::VectorXd out(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = detail::argmax(std::vector<double>(Z.row(i).begin(), Z.row(i).end()));
        return out;
    }

    json state() const override { return {{"ovr", ovr_}, {"coef", detail::to_json(coef_)}}; }

    void load_state(const json& j) override
    {
        ovr_ = j.at("ovr").get<bool>();
        coef_ = detail::matrix_from_json(j.at("coef"));
    }

private:
    Eigen::MatrixXd scores(const Eigen::MatrixXd& X) const
    {
        const Eigen::Index d = X.cols();
        return (X * coef_.topRows(d)).rowwise() + coef_.row(d);
    }

    bool ovr_ = false;
    Eigen::MatrixXd coef_; // (d+1) x K
    std::vector<double> history_;
    double grad_norm_ = 0.0;
};

} // namespace roadrough::models
