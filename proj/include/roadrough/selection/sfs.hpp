#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "roadrough/core/error.hpp"
#include "roadrough/core/metrics.hpp"
#include "roadrough/core/split.hpp"
#include "roadrough/models/fit_log.hpp"
#include "roadrough/models/forest.hpp"

namespace roadrough::selection {

/// Columns kept after dropping those constant on the training rows.
inline std::vector<std::size_t> constant_free_columns(const Eigen::MatrixXd& X_train)
{
    detail::require(X_train.rows() > 0 && X_train.cols() > 0, "drop_constant: empty matrix");
    std::vector<std::size_t> kept;
    for (Eigen::Index c = 0; c < X_train.cols(); ++c) {
        const auto col = X_train.col(c);
        if ((col.array() != col(0)).any()) kept.push_back(static_cast<std::size_t>(c));
    }
    if (kept.empty()) throw InvalidInput("drop_constant: every column is constant");
    return kept;
}

struct DropResult {
    Eigen::MatrixXd X;
    std::vector<std::size_t> kept;
};

inline DropResult drop_constant(const Eigen::MatrixXd& X_train)
{
    DropResult r;
    r.kept = constant_free_columns(X_train);
    r.X.resize(X_train.rows(), static_cast<Eigen::Index>(r.kept.size()));
    for (std::size_t c = 0; c < r.kept.size(); ++c)
        r.X.col(static_cast<Eigen::Index>(c)) = X_train.col(static_cast<Eigen::Index>(r.kept[c]));
    return r;
}

inline Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X, const std::vector<std::size_t>& cols)
{
    Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        detail::require(static_cast<Eigen::Index>(cols[c]) < X.cols(), "select_columns: index out of range");
        out.col(static_cast<Eigen::Index>(c)) = X.col(static_cast<Eigen::Index>(cols[c]));
    }
    return out;
}

struct SfsOptions {
    std::size_t k_folds = 5;
    std::size_t max_features = 0; // 0 = all columns
    // Scoring forest.
    std::size_t n_trees = 200;
    int max_depth = 8;
    std::uint64_t seed = 0;
    // Optional fit audit; rows are logged relative to row_offset.
    models::FitLog* log = nullptr;
    std::size_t row_offset = 0;
    std::vector<models::IndexRange> held_out;
};

struct SfsResult {
    std::vector<std::size_t> order; // selection order
    std::vector<double> cv_rmse;    // cv_rmse[i]: subset order[0..i]
    std::size_t chosen = 0;         // chosen subset size

    std::vector<std::size_t> subset() const
    {
        return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(chosen)};
    }
};

/// Mean RMSE over ordered folds of the scoring forest on `cols`.
inline double sfs_score(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<std::size_t>& cols,
                        const SfsOptions& opt)
{
    const auto rounds = ordered_kfold(static_cast<std::size_t>(X.rows()), opt.k_folds);
    const Eigen::MatrixXd Xs = select_columns(X, cols);
    Hyperparams hp{{"n_trees", static_cast<double>(opt.n_trees)},
                   {"max_depth", static_cast<double>(opt.max_depth)},
                   {"max_features", std::string("sqrt")},
                   {"seed", static_cast<double>(opt.seed)}};
    double sum = 0.0;
    for (const auto& r : rounds) {
        models::RandomForest rf(models::Task::Regression, hp);
        rf.fit(models::detail::rows_of(Xs, r.train), models::detail::rows_of(y, r.train));
        if (opt.log) {
            auto hidden = models::to_ranges(r.val, opt.row_offset);
            hidden.insert(hidden.end(), opt.held_out.begin(), opt.held_out.end());
            opt.log->record({"sfs forest", models::to_ranges(r.train, opt.row_offset), std::move(hidden)});
        }
        const Eigen::VectorXd yv = models::detail::rows_of(y, r.val);
        const Eigen::VectorXd pv = rf.predict(models::detail::rows_of(Xs, r.val));
        sum += rmse(models::detail::as_span(yv), models::detail::as_span(pv));
    }
    return sum / static_cast<double>(rounds.size());
}

using SubsetScorer = std::function<double(const std::vector<std::size_t>&)>;

/// Greedy forward selection with a caller-supplied subset score (lower is
/// better). Ties go to the lower column index; the chosen size is the first
/// global minimum of the curve.
inline SfsResult sfs_forward(std::size_t n_cols, std::size_t max_features, const SubsetScorer& score)
{
    detail::require(n_cols > 0, "sfs_forward: no columns");
    const std::size_t limit = max_features == 0 ? n_cols : std::min(max_features, n_cols);
    SfsResult res;
    std::vector<bool> used(n_cols, false);
    for (std::size_t step = 0; step < limit; ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = n_cols;
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (used[c]) continue;
            auto subset = res.order;
            subset.push_back(c);
            const double s = score(subset);
            if (s < best) {
                best = s;
                arg = c;
            }
        }
        detail::require(arg < n_cols, "sfs_forward: non-finite subset scores");
        used[arg] = true;
        res.order.push_back(arg);
        res.cv_rmse.push_back(best);
    }
    res.chosen = static_cast<std::size_t>(std::min_element(res.cv_rmse.begin(), res.cv_rmse.end()) -
                                          res.cv_rmse.begin()) + 1;
    return res;
}

/// Forward selection scored by a fixed random forest over ordered folds.
inline SfsResult sfs_forward(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SfsOptions& opt)
{
    detail::require(X.rows() == y.size(), "sfs_forward: X and y row counts differ");
    detail::require(opt.k_folds >= 2, "sfs_forward: k_folds must be >= 2");
    return sfs_forward(static_cast<std::size_t>(X.cols()), opt.max_features,
                       [&](const std::vector<std::size_t>& cols) { return sfs_score(X, y, cols, opt); });
}

} // namespace roadrough::selection
