#pragma once

#include <memory>
#include <string>
#include <vector>

#include "roadrough/models/adasyn.hpp"
#include "roadrough/models/forest.hpp"
#include "roadrough/models/knn.hpp"
#include "roadrough/models/linear.hpp"
#include "roadrough/models/logistic.hpp"
#include "roadrough/models/mlp.hpp"
#include "roadrough/models/naive_bayes.hpp"
#include "roadrough/models/svm.hpp"

namespace roadrough::models {

/// Families trained per task, baseline first.
inline std::vector<std::string> families_for(Task task)
{
    if (task == Task::Regression)
        return {"baseline", "linear", "lasso", "ridge", "elastic_net", "knn", "random_forest", "svm", "mlp"};
    return {"baseline", "logistic", "knn", "naive_bayes", "random_forest", "svm", "mlp"};
}

inline std::unique_ptr<Model> make_model(const std::string& family, Task task, Hyperparams hp = {})
{
    const bool reg = task == Task::Regression;
    auto regression_only = [&] {
        if (!reg) throw InvalidInput("model family '" + family + "' is regression-only");
    };
    auto classification_only = [&] {
        if (reg) throw InvalidInput("model family '" + family + "' is classification-only");
    };
    if (family == "baseline") return std::make_unique<Baseline>(task, std::move(hp));
    if (family == "linear") {
        regression_only();
        return std::make_unique<LinearModel>(LinearKind::Ols, std::move(hp));
    }
    if (family == "ridge") {
        regression_only();
        return std::make_unique<LinearModel>(LinearKind::Ridge, std::move(hp));
    }
    if (family == "lasso") {
        regression_only();
        return std::make_unique<LinearModel>(LinearKind::Lasso, std::move(hp));
    }
    if (family == "elastic_net") {
        regression_only();
        return std::make_unique<LinearModel>(LinearKind::ElasticNet, std::move(hp));
    }
    if (family == "logistic") {
        classification_only();
        return std::make_unique<LogisticRegression>(std::move(hp));
    }
    if (family == "naive_bayes") {
        classification_only();
        return std::make_unique<GaussianNaiveBayes>(std::move(hp));
    }
    if (family == "knn") return std::make_unique<KNearestNeighbors>(task, std::move(hp));
    if (family == "random_forest") return std::make_unique<RandomForest>(task, std::move(hp));
    if (family == "svm") return std::make_unique<SupportVectorMachine>(task, std::move(hp));
    if (family == "mlp") return std::make_unique<MultilayerPerceptron>(task, std::move(hp));
    throw InvalidInput("unknown model family '" + family + "'");
}

/// Cartesian product of named value lists, first name varying slowest.
inline std::vector<Hyperparams> grid_product(const std::vector<std::pair<std::string, std::vector<HyperValue>>>& axes)
{
    std::vector<Hyperparams> out{Hyperparams{}};
    for (const auto& [name, values] : axes) {
        std::vector<Hyperparams> next;
        for (const auto& base : out)
            for (const auto& v : values) {
                Hyperparams h = base;
                h.set(name, v);
                next.push_back(std::move(h));
            }
        out = std::move(next);
    }
    return out;
}

/// Default search grid. Stochastic families get `seed`.
inline std::vector<Hyperparams> default_grid(const std::string& family, Task task, std::uint64_t seed = 0)
{
    const HyperValue s = static_cast<double>(seed);
    if (family == "baseline" || family == "linear" || family == "naive_bayes") return {Hyperparams{}};
    if (family == "lasso") return grid_product({{"alpha", {0.01, 0.05, 0.1}}});
    if (family == "ridge") return grid_product({{"alpha", {60.0, 600.0, 6000.0}}});
    if (family == "elastic_net") return grid_product({{"alpha", {0.01, 0.05, 0.1}}, {"l1_ratio", {0.2, 0.5, 0.8}}});
    if (family == "logistic") return grid_product({{"l2", {1e-4, 1e-3, 1e-2}}});
    if (family == "knn") return grid_product({{"k", {5.0, 22.0, 50.0}}});
    if (family == "random_forest")
        return grid_product({{"n_trees", {100.0, 400.0}},
                             {"max_depth", {5.0, 10.0}},
                             {"max_features", {6.0, std::string("sqrt")}},
                             {"seed", {s}}});
    if (family == "svm") {
        auto g = grid_product({{"gamma", {1e-3, 1e-2}}, {"C", {1.0, 10.0}}});
        if (task == Task::Regression)
            for (auto& h : g) h.set("epsilon", 0.1);
        return g;
    }
    if (family == "mlp")
        return grid_product({{"layers", {std::vector<int>{2, 4, 6}, std::vector<int>{16, 16}}},
                             {"lr", {0.01}},
                             {"l2", {0.1, 1.0}},
                             {"seed", {s}}});
    throw InvalidInput("unknown model family '" + family + "'");
}

} // namespace roadrough::models
