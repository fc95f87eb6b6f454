#include <gtest/gtest.h>

#include <map>
#include <random>

#include "roadrough/selection/pca.hpp"
#include "roadrough/selection/sfs.hpp"
#include "support/oracles.hpp"

using namespace roadrough;
using namespace roadrough::selection;

namespace {

Eigen::MatrixXd gaussian(Eigen::Index n, Eigen::Index d, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd X(n, d);
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = g(rng);
    return X;
}

} // namespace

TEST(DropConstant, RemovesOnlyTrainConstantColumns)
{
    Eigen::MatrixXd X(4, 3);
    X << 5, 1, 2, 5, 2, 2, 5, 3, 2, 5, 4, 2;
    const auto r = drop_constant(X);
    EXPECT_EQ(r.kept, std::vector<std::size_t>{1});
    EXPECT_TRUE(r.X.col(0) == X.col(1));

    const auto Y = gaussian(10, 4, 1);
    EXPECT_EQ(drop_constant(Y).kept, (std::vector<std::size_t>{0, 1, 2, 3}));

    // Constant on train, varying on test: still dropped via the kept map.
    Eigen::MatrixXd test_rows(2, 3);
    test_rows << 7, 1, 9, 8, 2, 3;
    EXPECT_EQ(select_columns(test_rows, r.kept).cols(), 1);

    Eigen::MatrixXd C = Eigen::MatrixXd::Constant(3, 2, 1.0);
    EXPECT_THROW(drop_constant(C), InvalidInput);
}

TEST(Sfs, ExactCopyOfTargetIsPickedFirst)
{
    auto X = gaussian(300, 5, 2);
    const Eigen::VectorXd y = X.col(3);
    SfsOptions opt;
    opt.n_trees = 20;
    opt.max_features = 2;
    const auto r = sfs_forward(X, y, opt);
    ASSERT_EQ(r.cv_rmse.size(), 2u);
    EXPECT_EQ(r.order.front(), 3u);
}

TEST(Sfs, DuplicateInformativeFeatureIsNotReselectedEarly)
{
    auto X = gaussian(300, 5, 3);
    X.col(4) = X.col(0); // exact copy
    const Eigen::VectorXd y = 2.0 * X.col(0) + 0.8 * X.col(2) + 0.1 * X.col(1);
    SfsOptions opt;
    opt.n_trees = 20;
    opt.max_features = 2;
    const auto r = sfs_forward(X, y, opt);
    EXPECT_EQ(r.order[0], 0u);
    EXPECT_EQ(r.order[1], 2u);
}

TEST(Sfs, MatchesGreedyOracleOnThreeFeatures)
{
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto X = gaussian(120, 3, 10 + seed);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g(0.0, 0.3);
        Eigen::VectorXd y(120);
        for (Eigen::Index i = 0; i < 120; ++i) y(i) = X(i, 0) * X(i, 1) + 0.5 * X(i, 2) + g(rng);
        SfsOptions opt;
        opt.n_trees = 10;
        opt.max_depth = 4;
        opt.seed = seed;

        // Score every ordered subset once, then replay the greedy rule.
        std::map<std::vector<std::size_t>, double> table;
        const std::vector<std::vector<std::size_t>> all{{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0},
                                                        {2, 1}, {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0},
                                                        {2, 0, 1}, {2, 1, 0}};
        for (const auto& s : all) table[s] = sfs_score(X, y, s, opt);
        std::vector<std::size_t> chosen;
        std::vector<double> curve;
        for (int step = 0; step < 3; ++step) {
            double best = 1e300;
            std::size_t arg = 9;
            for (std::size_t c = 0; c < 3; ++c) {
                if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
                auto s = chosen;
                s.push_back(c);
                if (table[s] < best) {
                    best = table[s];
                    arg = c;
                }
            }
            chosen.push_back(arg);
            curve.push_back(best);
        }
        const auto r = sfs_forward(X, y, opt);
        EXPECT_EQ(r.order, chosen);
        ASSERT_EQ(r.cv_rmse.size(), 3u);
        for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(r.cv_rmse[i], curve[i]);
        const auto best_size = std::min_element(curve.begin(), curve.end()) - curve.begin() + 1;
        EXPECT_EQ(r.chosen, std::size_t(best_size));
        // The chosen subset reproduces its score.
        EXPECT_NEAR(sfs_score(X, y, r.subset(), opt), r.cv_rmse[r.chosen - 1], 1e-9);
    }
}

TEST(Sfs, TiesPreferLowerIndexAndSmallerSize)
{
    const auto r = sfs_forward(4, 0, [](const std::vector<std::size_t>& s) { return s.size() == 2 ? 1.0 : 1.0; });
    EXPECT_EQ(r.order, (std::vector<std::size_t>{0, 1, 2, 3}));
    EXPECT_EQ(r.chosen, 1u);
}

TEST(Pca, PointsOnALineNeedOneComponent)
{
    Eigen::MatrixXd X(20, 2);
    for (int i = 0; i < 20; ++i) X.row(i) << i, 3.0 * i - 2.0;
    const auto b = pca_fit(X, 0.99);
    EXPECT_EQ(b.n_components(), 1u);
    EXPECT_NEAR(b.explained_ratio(0), 1.0, 1e-12);
}

TEST(Pca, OrthonormalDecorrelatedAndMatchesJacobi)
{
    auto X = gaussian(400, 8, 5);
    Eigen::MatrixXd mix = gaussian(8, 8, 6);
    X = X * mix; // correlated columns
    X.col(7) = X.col(0) + 1e-3 * X.col(1);
    const auto b = pca_fit(X, 0.99);
    const auto m = static_cast<Eigen::Index>(b.n_components());
    ASSERT_GE(m, 1);
    EXPECT_LE((b.components.transpose() * b.components - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff(),
              1e-8);
    EXPECT_GE(b.explained_ratio.sum(), 0.99);
    for (Eigen::Index i = 1; i < m; ++i) EXPECT_LE(b.explained_ratio(i), b.explained_ratio(i - 1));

    const Eigen::MatrixXd Z = b.transform(X);
    const Eigen::MatrixXd cz = (Z.transpose() * Z) / double(X.rows() - 1);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            if (i != j) EXPECT_LT(std::abs(cz(i, j)), 1e-8);

    const Eigen::MatrixXd C = X.rowwise() - X.colwise().mean();
    const auto ev = test::jacobi_eigenvalues(C.transpose() * C / double(X.rows() - 1));
    const double total = ev.sum();
    for (Eigen::Index i = 0; i < m; ++i) EXPECT_NEAR(b.explained_ratio(i), ev(i) / total, 1e-9);

    // Mean row maps to the origin; reconstruction keeps the target variance.
    const Eigen::MatrixXd mean_row = b.mean;
    EXPECT_LT(b.transform(mean_row).cwiseAbs().maxCoeff(), 1e-9);
    const Eigen::MatrixXd R = b.inverse_transform(Z);
    const double lost = (X - R).squaredNorm() / double(X.rows() - 1);
    EXPECT_LE(lost, (1.0 - 0.99) * total + 1e-6);
}

TEST(Pca, RejectsDegenerateInput)
{
    Eigen::MatrixXd C = Eigen::MatrixXd::Constant(5, 3, 2.0);
    EXPECT_THROW(pca_fit(C, 0.99), InvalidInput);
    EXPECT_THROW(pca_fit(gaussian(5, 2, 1), 0.0), InvalidInput);
}
