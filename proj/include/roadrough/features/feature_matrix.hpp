#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "roadrough/core/error.hpp"
#include "roadrough/core/iri_level.hpp"
#include "roadrough/core/types.hpp"
#include "roadrough/features/extractors.hpp"

namespace roadrough::features {

inline constexpr std::array<std::string_view, 2> kChannels{"acc_z", "speed"};
inline constexpr std::size_t kNumFeatures = kNumExtractors * kChannels.size();

/// Column names: all acc_z extractors first, then all speed extractors.
inline std::vector<std::string> feature_names()
{
    std::vector<std::string> names;
    names.reserve(kNumFeatures);
    for (auto ch : kChannels)
        for (auto e : kExtractorNames) names.push_back(std::string(e) + "@" + std::string(ch));
    return names;
}

/// One row per window, in input order; targets are the window IRI and its level.
/// Windows must already share a common length. Time is measured from the
/// window's first sample.
inline Dataset build_feature_matrix(const std::vector<AlignedSegment>& windows)
{
    detail::require(!windows.empty(), "build_feature_matrix: no windows");
    const std::size_t len = windows.front().t.size();
    Dataset d;
    d.feature_names = feature_names();
    d.X.resize(static_cast<Eigen::Index>(windows.size()), static_cast<Eigen::Index>(kNumFeatures));
    d.y.resize(static_cast<Eigen::Index>(windows.size()));
    d.level.reserve(windows.size());
    for (std::size_t r = 0; r < windows.size(); ++r) {
        const auto& w = windows[r];
        detail::require(w.t.size() == len && w.acc_z.size() == len && w.speed.size() == len,
                        "build_feature_matrix: window " + std::to_string(w.window_id) +
                            " is not resampled to the common length");
        std::vector<double> t(len);
        for (std::size_t i = 0; i < len; ++i) t[i] = w.t[i] - w.t.front();
        const auto fa = extract_channel_features(w.acc_z, t);
        const auto fs = extract_channel_features(w.speed, t);
        for (std::size_t c = 0; c < kNumExtractors; ++c) {
            d.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = fa[c];
            d.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(kNumExtractors + c)) = fs[c];
        }
        for (std::size_t c = 0; c < kNumFeatures; ++c)
            if (!std::isfinite(d.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))))
                throw InvalidInput("build_feature_matrix: non-finite feature '" + d.feature_names[c] +
                                   "' in window " + std::to_string(w.window_id));
        d.y(static_cast<Eigen::Index>(r)) = w.iri;
        d.level.push_back(to_iri_level(w.iri));
    }
    return d;
}

/// Column-wise z-scoring with statistics from the training rows only
/// (population standard deviation).
struct Standardizer {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd std;

    static Standardizer fit(const Eigen::MatrixXd& X_train)
    {
        detail::require(X_train.rows() > 0, "standardize_fit: empty matrix");
        Standardizer s;
        s.mean = X_train.colwise().mean();
        s.std = ((X_train.rowwise() - s.mean).array().square().colwise().sum() / static_cast<double>(X_train.rows()))
                    .sqrt();
        for (Eigen::Index c = 0; c < s.std.size(); ++c)
            detail::require(s.std(c) > 0.0, "standardize_fit: column " + std::to_string(c) +
                                                " has zero variance; drop constant features first");
        return s;
    }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const
    {
        detail::require(X.cols() == mean.size(), "standardize_apply: column count differs from fit");
        return (X.rowwise() - mean).array().rowwise() / std.array();
    }
};

inline Standardizer standardize_fit(const Eigen::MatrixXd& X_train) { return Standardizer::fit(X_train); }
inline Eigen::MatrixXd standardize_apply(const Standardizer& s, const Eigen::MatrixXd& X) { return s.apply(X); }

} // namespace roadrough::features
