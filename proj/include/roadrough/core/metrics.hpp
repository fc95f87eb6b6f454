#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "roadrough/core/types.hpp"

namespace roadrough {

struct RegressionMetrics {
    double r2 = 0.0;
    double mae = 0.0;
    double rmse = 0.0;
    double mre = 0.0;
};

/// R2 uses the mean of the evaluated targets, so a constant predictor fitted
/// elsewhere can score below zero.
inline RegressionMetrics regression_metrics(std::span<const double> y, std::span<const double> yhat,
                                            bool with_mre = true)
{
    detail::require(y.size() == yhat.size(), "regression_metrics: length mismatch");
    detail::require(y.size() >= 2, "regression_metrics: need at least 2 samples");
    const double n = static_cast<double>(y.size());

    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;

    double sse = 0.0, sst = 0.0, sae = 0.0, sre = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = y[i] - yhat[i];
        sse += e * e;
        sst += (y[i] - mean) * (y[i] - mean);
        sae += std::abs(e);
        if (with_mre) {
            if (y[i] == 0.0) throw InvalidInput("regression_metrics: zero target makes MRE undefined");
            sre += std::abs(e) / std::abs(y[i]);
        }
    }
    RegressionMetrics m;
    m.rmse = std::sqrt(sse / n);
    m.mae = sae / n;
    m.mre = with_mre ? sre / n : 0.0;
    if (sst > 0.0)
        m.r2 = 1.0 - sse / sst;
    else
        m.r2 = sse == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
    return m;
}

inline double rmse(std::span<const double> y, std::span<const double> yhat)
{
    detail::require(y.size() == yhat.size() && !y.empty(), "rmse: length mismatch or empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    return std::sqrt(s / static_cast<double>(y.size()));
}

using ConfusionMatrix = std::array<std::array<std::size_t, kNumIriLevels>, kNumIriLevels>;

/// Entry (i, j) counts true class i predicted as class j.
inline ConfusionMatrix confusion_matrix(std::span<const IriLevel> y, std::span<const IriLevel> yhat)
{
    detail::require(y.size() == yhat.size(), "confusion_matrix: length mismatch");
    ConfusionMatrix c{};
    for (std::size_t i = 0; i < y.size(); ++i) ++c[index_of(y[i])][index_of(yhat[i])];
    return c;
}

enum class Averaging { Macro, Weighted };

struct ClassificationMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::array<double, kNumIriLevels> class_precision{};
    std::array<double, kNumIriLevels> class_recall{};
    std::array<double, kNumIriLevels> class_f1{};
};

/// Per-class scores from a confusion matrix. Zero denominators give 0.
inline ClassificationMetrics classification_metrics(const ConfusionMatrix& c,
                                                    Averaging avg = Averaging::Macro)
{
    ClassificationMetrics m;
    std::array<double, kNumIriLevels> support{};
    double total = 0.0;
    for (std::size_t k = 0; k < kNumIriLevels; ++k) {
        double tp = static_cast<double>(c[k][k]);
        double pred = 0.0, actual = 0.0;
        for (std::size_t j = 0; j < kNumIriLevels; ++j) {
            pred += static_cast<double>(c[j][k]);
            actual += static_cast<double>(c[k][j]);
        }
        const double p = pred > 0 ? tp / pred : 0.0;
        const double r = actual > 0 ? tp / actual : 0.0;
        m.class_precision[k] = p;
        m.class_recall[k] = r;
        m.class_f1[k] = (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;
        support[k] = actual;
        total += actual;
    }
    for (std::size_t k = 0; k < kNumIriLevels; ++k) {
        const double w = avg == Averaging::Macro ? 1.0 / kNumIriLevels
                                                 : (total > 0 ? support[k] / total : 0.0);
        m.precision += w * m.class_precision[k];
        m.recall += w * m.class_recall[k];
        m.f1 += w * m.class_f1[k];
    }
    return m;
}

/// Macro-averaged precision/recall/F1 over the three IRI levels. A class absent
/// from both labels and predictions contributes zero.
inline ClassificationMetrics classification_metrics(std::span<const IriLevel> y,
                                                    std::span<const IriLevel> yhat,
                                                    Averaging avg = Averaging::Macro)
{
    detail::require(y.size() == yhat.size(), "classification_metrics: length mismatch");
    detail::require(!y.empty(), "classification_metrics: empty input");
    return classification_metrics(confusion_matrix(y, yhat), avg);
}

/// Share of off-diagonal predictions that land in an adjacent class.
inline double adjacent_error_share(const ConfusionMatrix& c)
{
    double wrong = 0.0, adjacent = 0.0;
    for (std::size_t i = 0; i < kNumIriLevels; ++i)
        for (std::size_t j = 0; j < kNumIriLevels; ++j) {
            if (i == j) continue;
            wrong += static_cast<double>(c[i][j]);
            if (i + 1 == j || j + 1 == i) adjacent += static_cast<double>(c[i][j]);
        }
    return wrong > 0 ? adjacent / wrong : 1.0;
}

} // namespace roadrough
