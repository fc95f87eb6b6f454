#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "roadrough/core/metrics.hpp"
#include "roadrough/core/split.hpp"
#include "roadrough/features/feature_matrix.hpp"
#include "roadrough/models/fit_log.hpp"
#include "roadrough/models/registry.hpp"
#include "roadrough/selection/pca.hpp"

namespace roadrough::models {

/// Macro-averaged F1 over classes 0..k-1; a class with no support and no
/// predictions scores 0.
inline double macro_f1(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat, int k)
{
    detail::require(y.size() == yhat.size() && y.size() > 0, "macro_f1: length mismatch or empty input");
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const auto a = static_cast<Eigen::Index>(y(i));
        const auto b = static_cast<Eigen::Index>(yhat(i));
        detail::require(a >= 0 && a < k && b >= 0 && b < k, "macro_f1: label out of range");
        c(a, b) += 1.0;
    }
    double f1 = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
        const double tp = c(j, j), pred = c.col(j).sum(), actual = c.row(j).sum();
        const double p = pred > 0 ? tp / pred : 0.0;
        const double r = actual > 0 ? tp / actual : 0.0;
        f1 += (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;
    }
    return f1 / static_cast<double>(k);
}

/// Scaling, then optional PCA, both fitted on training rows only.
struct Preprocessor {
    features::Standardizer scaler;
    std::optional<selection::PcaBasis> pca;

    static Preprocessor fit(const Eigen::MatrixXd& X_train, bool use_pca, double pca_target)
    {
        Preprocessor p;
        p.scaler = features::Standardizer::fit(X_train);
        if (use_pca) p.pca = selection::pca_fit(p.scaler.apply(X_train), pca_target);
        return p;
    }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const
    {
        Eigen::MatrixXd Z = scaler.apply(X);
        return pca ? pca->transform(Z) : Z;
    }
};

struct PrepOptions {
    bool pca = false;
    double pca_target = 0.99;
    bool adasyn = false; // classification only
    std::size_t adasyn_k = 5;
    std::uint64_t seed = 0;
};

/// Training rows after preprocessing (and ADASYN for classification).
struct PreparedTrain {
    Preprocessor prep;
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> warnings;
};

/// `rows` are dataset row numbers of X_train, `held_out` the rows the fit
/// must not touch; both go to the log.
inline PreparedTrain prepare_train(const Eigen::MatrixXd& X_train, const Eigen::VectorXd& y_train, Task task,
                                   const PrepOptions& opt, FitLog* log, const std::string& tag,
                                   const std::vector<IndexRange>& rows, const std::vector<IndexRange>& held_out)
{
    PreparedTrain out;
    out.prep = Preprocessor::fit(X_train, opt.pca, opt.pca_target);
    if (log) {
        log->record({tag + " standardizer", rows, held_out});
        if (opt.pca) log->record({tag + " pca", rows, held_out});
    }
    out.X = out.prep.apply(X_train);
    out.y = y_train;
    if (opt.adasyn && task == Task::Classification) {
        auto r = adasyn_resample(out.X, out.y, opt.adasyn_k, opt.seed);
        out.X = std::move(r.X);
        out.y = std::move(r.y);
        out.warnings = std::move(r.warnings);
        if (log) log->record({tag + " adasyn", rows, held_out});
    }
    return out;
}

inline double score(Task task, const Eigen::VectorXd& y, const Eigen::VectorXd& yhat, int n_classes)
{
    if (task == Task::Regression) return rmse(detail::as_span(y), detail::as_span(yhat));
    return macro_f1(y, yhat, n_classes);
}

/// Lower-is-better for RMSE, higher-is-better for F1.
inline bool better(Task task, double a, double b) { return task == Task::Regression ? a < b : a > b; }

struct GridOptions {
    std::size_t k_folds = 5;
    PrepOptions prep;
    int n_classes = 0;          // 0: infer from y
    std::size_t row_offset = 0;       // dataset row number of X's first row, for the log
    std::vector<IndexRange> held_out; // extra rows no fit may see (the test split)
    FitLog* log = nullptr;
};

struct GridResult {
    std::string family;
    Task task = Task::Regression;
    std::vector<Hyperparams> points;
    Eigen::MatrixXd cv;              // points x rounds; NaN rows for failed points
    std::vector<double> mean;        // NaN for failed points
    std::vector<std::string> errors; // empty for points that fitted
    std::size_t best = 0;

    const Hyperparams& best_params() const { return points.at(best); }
    bool failed(std::size_t p) const { return !errors[p].empty(); }
};

/// Exhaustive search scored by the mean metric over ordered k-fold rounds.
/// Preprocessing and resampling are refitted inside each round's train part.
inline GridResult grid_search(const std::string& family, Task task, const std::vector<Hyperparams>& grid,
                              const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GridOptions& opt = {})
{
    detail::require(!grid.empty(), "grid_search: empty grid for '" + family + "'");
    detail::require(X.rows() == y.size(), "grid_search: X and y row counts differ");
    const auto rounds = ordered_kfold(static_cast<std::size_t>(X.rows()), opt.k_folds);
    const int n_classes = task == Task::Classification ? (opt.n_classes > 0 ? opt.n_classes : detail::num_classes(y)) : 0;

    GridResult res;
    res.family = family;
    res.task = task;
    res.points = grid;
    res.cv = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(rounds.size()),
                                       std::numeric_limits<double>::quiet_NaN());
    res.mean.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
    res.errors.assign(grid.size(), "");

    // Round preprocessing does not depend on the grid point.
    std::vector<PreparedTrain> prepared;
    std::vector<Eigen::MatrixXd> X_val;
    std::vector<Eigen::VectorXd> y_val;
    std::vector<std::vector<IndexRange>> seen, hidden;
    for (std::size_t r = 0; r < rounds.size(); ++r) {
        seen.push_back(to_ranges(rounds[r].train, opt.row_offset));
        hidden.push_back(to_ranges(rounds[r].val, opt.row_offset));
        hidden.back().insert(hidden.back().end(), opt.held_out.begin(), opt.held_out.end());
        prepared.push_back(prepare_train(detail::rows_of(X, rounds[r].train), detail::rows_of(y, rounds[r].train), task,
                                         opt.prep, opt.log, family + " round " + std::to_string(r), seen[r],
                                         hidden[r]));
        X_val.push_back(prepared.back().prep.apply(detail::rows_of(X, rounds[r].val)));
        y_val.push_back(detail::rows_of(y, rounds[r].val));
    }

    bool any = false;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        try {
            double sum = 0.0;
            for (std::size_t r = 0; r < rounds.size(); ++r) {
                auto m = make_model(family, task, grid[p]);
                m->fit(prepared[r].X, prepared[r].y);
                if (opt.log)
                    opt.log->record({family + " point " + std::to_string(p) + " round " + std::to_string(r), seen[r],
                                     hidden[r]});
                const double s = score(task, y_val[r], m->predict(X_val[r]), n_classes);
                res.cv(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(r)) = s;
                sum += s;
            }
            res.mean[p] = sum / static_cast<double>(rounds.size());
        } catch (const Error& e) {
            res.errors[p] = e.what();
            res.cv.row(static_cast<Eigen::Index>(p)).setConstant(std::numeric_limits<double>::quiet_NaN());
            res.mean[p] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        if (!any || better(task, res.mean[p], res.mean[res.best])) res.best = p;
        any = true;
    }
    if (!any) throw ConvergenceError("grid_search: every grid point of '" + family + "' failed: " + res.errors.front());
    return res;
}

} // namespace roadrough::models
