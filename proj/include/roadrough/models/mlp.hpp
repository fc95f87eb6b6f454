#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "roadrough/models/logistic.hpp"
#include "roadrough/models/model.hpp"

namespace roadrough::models {

/// Fully connected layer sizes, input to output.
struct MlpShape {
    std::vector<Eigen::Index> sizes;

    std::size_t n_layers() const { return sizes.size() - 1; }

    Eigen::Index n_params() const
    {
        Eigen::Index n = 0;
        for (std::size_t l = 0; l + 1 < sizes.size(); ++l) n += (sizes[l] + 1) * sizes[l + 1];
        return n;
    }

    /// Offset of layer l's weights in the flat vector; its bias follows them.
    Eigen::Index offset(std::size_t layer) const
    {
        Eigen::Index n = 0;
        for (std::size_t l = 0; l < layer; ++l) n += (sizes[l] + 1) * sizes[l + 1];
        return n;
    }
};

/// Mean batch loss and its gradient for a ReLU network. The output layer is
/// linear with half squared error (regression, Y has one column) or softmax
/// with cross-entropy (classification, Y one-hot). The L2 term is
/// alpha / (2 N) * sum |W|^2 over weights only, N the batch size.
inline double mlp_loss(const MlpShape& shape, const Eigen::VectorXd& params, const Eigen::MatrixXd& X,
                       const Eigen::MatrixXd& Y, bool softmax, double alpha, Eigen::VectorXd* grad)
{
    const std::size_t L = shape.n_layers();
    const double n = static_cast<double>(X.rows());
    std::vector<Eigen::MatrixXd> act(L + 1);
    act[0] = X;
    for (std::size_t l = 0; l < L; ++l) {
        const Eigen::Index o = shape.offset(l);
        const Eigen::Map<const Eigen::MatrixXd> W(params.data() + o, shape.sizes[l], shape.sizes[l + 1]);
        const Eigen::Map<const Eigen::RowVectorXd> b(params.data() + o + W.size(), shape.sizes[l + 1]);
        act[l + 1] = (act[l] * W).rowwise() + b;
        if (l + 1 < L) act[l + 1] = act[l + 1].cwiseMax(0.0);
    }
    double loss = 0.0;
    Eigen::MatrixXd delta;
    if (softmax) {
        const Eigen::MatrixXd& Z = act[L];
        for (Eigen::Index i = 0; i < Z.rows(); ++i) loss += detail::log_sum_exp(Z.row(i)) - Z.row(i).dot(Y.row(i));
        loss /= n;
        if (grad) delta = (detail::softmax_rows(Z) - Y) / n;
    } else {
        const Eigen::MatrixXd r = act[L] - Y;
        loss = 0.5 * r.squaredNorm() / n;
        if (grad) delta = r / n;
    }
    double wsq = 0.0;
    for (std::size_t l = 0; l < L; ++l)
        wsq += Eigen::Map<const Eigen::VectorXd>(params.data() + shape.offset(l), shape.sizes[l] * shape.sizes[l + 1])
                   .squaredNorm();
    loss += 0.5 * alpha * wsq / n;
    if (!grad) return loss;

    grad->resize(params.size());
    for (std::size_t l = L; l-- > 0;) {
        const Eigen::Index o = shape.offset(l);
        const Eigen::Map<const Eigen::MatrixXd> W(params.data() + o, shape.sizes[l], shape.sizes[l + 1]);
        Eigen::Map<Eigen::MatrixXd> gW(grad->data() + o, shape.sizes[l], shape.sizes[l + 1]);
        Eigen::Map<Eigen::RowVectorXd> gb(grad->data() + o + W.size(), shape.sizes[l + 1]);
        gW = act[l].transpose() * delta + (alpha / n) * W;
        gb = delta.colwise().sum();
        if (l > 0) delta = ((delta * W.transpose()).array() * (act[l].array() > 0.0).cast<double>()).matrix();
    }
    return loss;
}

/// Multilayer perceptron trained by Adam on shuffled mini-batches.
/// Hyperparams: layers (hidden sizes, may be empty), lr (initial rate),
/// l2 (alpha above), seed; optional batch_size (200), max_epochs (200),
/// tol (1e-4). The rate halves after 2 epochs without a tol improvement of
/// the best epoch loss; training stops after 10 such epochs.
class MultilayerPerceptron : public Model {
public:
    MultilayerPerceptron(Task task, Hyperparams hp = {}) : Model(task, std::move(hp)) {}

    static constexpr int kPatience = 10;
    static constexpr int kHalveAfter = 2;

    std::string family() const override { return "mlp"; }

    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const
    {
        detail::require(fitted() && task_ == Task::Classification, "mlp: predict_proba needs a fitted classifier");
        return detail::softmax_rows(forward(X));
    }

    const MlpShape& shape() const { return shape_; }
    const Eigen::VectorXd& params() const { return params_; }
    const std::vector<double>& epoch_losses() const { return epoch_loss_; }

protected:
    void do_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) override
    {
        std::vector<int> hidden = hp_.has("layers") ? hp_.int_list("layers") : std::vector<int>{};
        for (int h : hidden) detail::require(h > 0, "mlp: layer sizes must be positive");
        const double lr0 = hp_.number("lr");
        const double alpha = hp_.number("l2");
        detail::require(lr0 > 0 && alpha >= 0, "mlp: need lr > 0 and l2 >= 0");
        const auto batch = static_cast<Eigen::Index>(hp_.number_or("batch_size", 200));
        const auto max_epochs = static_cast<int>(hp_.number_or("max_epochs", 200));
        const double tol = hp_.number_or("tol", 1e-4);
        detail::require(batch > 0 && max_epochs > 0, "mlp: batch_size and max_epochs must be positive");
        std::mt19937_64 rng(static_cast<std::uint64_t>(hp_.number_or("seed", 0)));

        const bool cls = task_ == Task::Classification;
        const Eigen::MatrixXd Y = cls ? detail::one_hot(y, detail::num_classes(y)) : Eigen::MatrixXd(y);
        shape_.sizes = {X.cols()};
        for (int h : hidden) shape_.sizes.push_back(h);
        shape_.sizes.push_back(Y.cols());

        // Glorot-uniform weights and biases.
        params_.resize(shape_.n_params());
        for (std::size_t l = 0; l < shape_.n_layers(); ++l) {
            const double bound = std::sqrt(6.0 / static_cast<double>(shape_.sizes[l] + shape_.sizes[l + 1]));
            std::uniform_real_distribution<double> u(-bound, bound);
            const Eigen::Index o = shape_.offset(l);
            const Eigen::Index len = (shape_.sizes[l] + 1) * shape_.sizes[l + 1];
            for (Eigen::Index i = 0; i < len; ++i) params_(o + i) = u(rng);
        }

        constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        Eigen::VectorXd m = Eigen::VectorXd::Zero(params_.size());
        Eigen::VectorXd v = Eigen::VectorXd::Zero(params_.size());
        Eigen::VectorXd g;
        double lr = lr0;
        std::size_t step = 0;
        double best = std::numeric_limits<double>::infinity();
        int stale = 0;
        epoch_loss_.clear();
        std::vector<Eigen::Index> order(static_cast<std::size_t>(X.rows()));
        std::iota(order.begin(), order.end(), Eigen::Index{0});

        for (int epoch = 0; epoch < max_epochs; ++epoch) {
            std::shuffle(order.begin(), order.end(), rng);
            double total = 0.0;
            for (Eigen::Index start = 0; start < X.rows(); start += batch) {
                const Eigen::Index len = std::min(batch, X.rows() - start);
                Eigen::MatrixXd Xb(len, X.cols()), Yb(len, Y.cols());
                for (Eigen::Index r = 0; r < len; ++r) {
                    Xb.row(r) = X.row(order[static_cast<std::size_t>(start + r)]);
                    Yb.row(r) = Y.row(order[static_cast<std::size_t>(start + r)]);
                }
                const double loss = mlp_loss(shape_, params_, Xb, Yb, cls, alpha, &g);
                if (!std::isfinite(loss) || !g.allFinite())
                    throw ConvergenceError("mlp: loss diverged at epoch " + std::to_string(epoch + 1));
                total += loss * static_cast<double>(len);
                ++step;
                m = b1 * m + (1.0 - b1) * g;
                v = b2 * v + (1.0 - b2) * g.cwiseAbs2();
                const double t = static_cast<double>(step);
                const double lr_t = lr * std::sqrt(1.0 - std::pow(b2, t)) / (1.0 - std::pow(b1, t));
                params_.array() -= lr_t * m.array() / (v.array().sqrt() + eps);
            }
            const double epoch_loss = total / static_cast<double>(X.rows());
            epoch_loss_.push_back(epoch_loss);
            if (epoch_loss < best - tol) {
                stale = 0;
            } else {
                ++stale;
                if (stale % kHalveAfter == 0) lr *= 0.5;
            }
            best = std::min(best, epoch_loss);
            if (stale >= kPatience) break;
        }
    }

    Eigen::VectorXd do_predict(const Eigen::MatrixXd& X) const override
    {
        const Eigen::MatrixXd Z = forward(X);
        if (task_ == Task::Regression) return Z.col(0);
        Eigen::VectorXd out(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            Eigen::Index best = 0;
            for (Eigen::Index c = 1; c < Z.cols(); ++c)
                if (Z(i, c) > Z(i, best)) best = c;
            out(i) = static_cast<double>(best);
        }
        return out;
    }

    json state() const override
    {
        std::vector<Eigen::Index> sizes = shape_.sizes;
        return {{"sizes", sizes}, {"params", detail::to_json(params_)}};
    }

    void load_state(const json& j) override
    {
        shape_.sizes = j.at("sizes").get<std::vector<Eigen::Index>>();
        params_ = detail::vector_from_json(j.at("params"));
        if (params_.size() != shape_.n_params()) throw IoError("mlp: parameter count does not match layer sizes");
    }

private:
    /// Output-layer pre-activations.
    Eigen::MatrixXd forward(const Eigen::MatrixXd& X) const
    {
        Eigen::MatrixXd a = X;
        const std::size_t L = shape_.n_layers();
        for (std::size_t l = 0; l < L; ++l) {
            const Eigen::Index o = shape_.offset(l);
            const Eigen::Map<const Eigen::MatrixXd> W(params_.data() + o, shape_.sizes[l], shape_.sizes[l + 1]);
            const Eigen::Map<const Eigen::RowVectorXd> b(params_.data() + o + W.size(), shape_.sizes[l + 1]);
            Eigen::MatrixXd z = (a * W).rowwise() + b;
            a = l + 1 < L ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
        }
        return a;
    }

    MlpShape shape_;
    Eigen::VectorXd params_;
    std::vector<double> epoch_loss_;
};

} // namespace roadrough::models
