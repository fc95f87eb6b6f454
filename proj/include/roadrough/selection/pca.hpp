#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include "roadrough/core/error.hpp"

namespace roadrough::selection {

/// Principal axes of the training rows, truncated to a variance target.
struct PcaBasis {
    Eigen::RowVectorXd mean;
    Eigen::MatrixXd components;       // d x m, orthonormal columns
    Eigen::VectorXd explained_ratio;  // m kept ratios, non-increasing
    Eigen::VectorXd all_ratios;       // ratios of every eigenvalue, for reporting

    std::size_t n_components() const { return static_cast<std::size_t>(components.cols()); }

    Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const
    {
        detail::require(X.cols() == mean.size(), "pca_transform: column count differs from fit");
        return (X.rowwise() - mean) * components;
    }

    Eigen::MatrixXd inverse_transform(const Eigen::MatrixXd& Z) const
    {
        return (Z * components.transpose()).rowwise() + mean;
    }
};

inline PcaBasis pca_fit(const Eigen::MatrixXd& X_train, double variance_target = 0.99)
{
    detail::require(variance_target > 0.0 && variance_target <= 1.0, "pca_fit: variance target must be in (0, 1]");
    detail::require(X_train.rows() >= 2 && X_train.cols() >= 1, "pca_fit: need at least 2 rows");
    PcaBasis b;
    b.mean = X_train.colwise().mean();
    const Eigen::MatrixXd C = X_train.rowwise() - b.mean;
    Eigen::MatrixXd cov = (C.transpose() * C) / static_cast<double>(X_train.rows() - 1);
    cov = 0.5 * (cov + cov.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    detail::require(es.info() == Eigen::Success, "pca_fit: eigendecomposition failed");

    // Eigen returns ascending eigenvalues; flip to descending.
    const Eigen::Index d = cov.rows();
    Eigen::VectorXd vals = es.eigenvalues().reverse().cwiseMax(0.0);
    Eigen::MatrixXd vecs = es.eigenvectors().rowwise().reverse();
    const double total = vals.sum();
    if (!(total > 0.0)) throw InvalidInput("pca_fit: training data has zero variance");
    b.all_ratios = vals / total;

    Eigen::Index m = 0;
    double cum = 0.0;
    while (m < d && cum < variance_target - 1e-12) cum += b.all_ratios(m++);
    if (m == 0) throw InvalidInput("pca_fit: no component retained");

    // Sign convention: largest-magnitude loading of each component is positive.
    for (Eigen::Index c = 0; c < m; ++c) {
        Eigen::Index arg;
        vecs.col(c).cwiseAbs().maxCoeff(&arg);
        if (vecs(arg, c) < 0) vecs.col(c) *= -1.0;
    }
    b.components = vecs.leftCols(m);
    b.explained_ratio = b.all_ratios.head(m);
    return b;
}

inline Eigen::MatrixXd pca_transform(const PcaBasis& b, const Eigen::MatrixXd& X) { return b.transform(X); }

} // namespace roadrough::selection
