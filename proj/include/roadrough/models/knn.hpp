#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "roadrough/models/model.hpp"

namespace roadrough::models {

/// k nearest rows by Euclidean distance; mean target or majority class.
/// Distance ties go to the lower row, vote ties to the lower class.
/// Hyperparams: k.
class KNearestNeighbors : public Model {
public:
    KNearestNeighbors(Task task, Hyperparams hp = {}) : Model(task, std::move(hp)) {}

    std::string family() const override { return "knn"; }

    /// Row indices of the k nearest training rows to q, nearest first.
    std::vector<Eigen::Index> neighbors(const Eigen::RowVectorXd& q) const
    {
        std::vector<std::pair<double, Eigen::Index>> d(static_cast<std::size_t>(X_.rows()));
        for (Eigen::Index i = 0; i < X_.rows(); ++i) d[static_cast<std::size_t>(i)] = {(X_.row(i) - q).squaredNorm(), i};
        const auto k = static_cast<std::ptrdiff_t>(k_);
        std::partial_sort(d.begin(), d.begin() + k, d.end());
        std::vector<Eigen::Index> out;
        out.reserve(k_);
        for (std::ptrdiff_t j = 0; j < k; ++j) out.push_back(d[static_cast<std::size_t>(j)].second);
        return out;
    }

protected:
    void do_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) override
    {
        const double k = hp_.number("k");
        detail::require(k >= 1 && k == std::floor(k), "knn: k must be a positive integer");
        detail::require(static_cast<Eigen::Index>(k) <= X.rows(), "knn: k exceeds the number of training rows");
        k_ = static_cast<std::size_t>(k);
        X_ = X;
        y_ = y;
        n_classes_ = task_ == Task::Classification ? detail::num_classes(y) : 0;
    }

    Eigen::VectorXd do_predict(const Eigen::MatrixXd& X) const override
    {
        Eigen::VectorXd out(X.rows());
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
            const auto nb = neighbors(X.row(r));
            if (task_ == Task::Regression) {
                double s = 0.0;
                for (auto i : nb) s += y_(i);
                out(r) = s / static_cast<double>(nb.size());
            } else {
                std::vector<int> votes(static_cast<std::size_t>(n_classes_), 0);
                for (auto i : nb) ++votes[static_cast<std::size_t>(y_(i))];
                out(r) = detail::argmax(votes);
            }
        }
        return out;
    }

    json state() const override
    {
        return {{"k", k_}, {"n_classes", n_classes_}, {"X", detail::to_json(X_)}, {"y", detail::to_json(y_)}};
    }

    void load_state(const json& j) override
    {
        k_ = j.at("k").get<std::size_t>();
        n_classes_ = j.at("n_classes").get<int>();
        X_ = detail::matrix_from_json(j.at("X"));
        y_ = detail::vector_from_json(j.at("y"));
    }

private:
    std::size_t k_ = 1;
    int n_classes_ = 0;
    Eigen::MatrixXd X_;
    Eigen::VectorXd y_;
};

} // namespace roadrough::models
