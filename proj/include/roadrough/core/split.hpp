#pragma once

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "roadrough/core/types.hpp"

namespace roadrough {

/// Route-ordered holdout. The test part is the last floor(N * (1 - train_frac))
/// rows, so N = 5031 at 0.8 splits 4025 / 1006.
inline std::pair<Dataset, Dataset> ordered_split(const Dataset& data, double train_frac)
{
    detail::require(train_frac > 0.0 && train_frac < 1.0, "ordered_split: train_frac must be in (0, 1)");
    const std::size_t n = data.rows();
    detail::require(n > 0, "ordered_split: empty dataset");
    const auto n_test =
        static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - train_frac) + 1e-9));
    const std::size_t n_train = n - std::min(n, n_test);
    detail::require(n_train > 0 && n_train < n, "ordered_split: one side of the split would be empty");
    return {data.slice(0, n_train), data.slice(n_train, n)};
}

struct FoldRound {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
};

/// Expanding-window folds over k contiguous blocks. Round i trains on blocks
/// 0..i and validates on block i+1, so there are k-1 rounds and validation
/// always follows training.
inline std::vector<FoldRound> ordered_kfold(std::size_t n, std::size_t k)
{
    detail::require(k >= 2, "ordered_kfold: k must be >= 2");
    detail::require(n >= k, "ordered_kfold: need n >= k");
    // Block sizes as in the usual contiguous k-fold: the first n % k blocks get one extra.
    std::vector<std::size_t> bounds{0};
    for (std::size_t b = 0; b < k; ++b) bounds.push_back(bounds.back() + n / k + (b < n % k ? 1 : 0));

    std::vector<FoldRound> rounds;
    rounds.reserve(k - 1);
    for (std::size_t i = 0; i + 1 < k; ++i) {
        FoldRound r;
        r.train.resize(bounds[i + 1]);
        std::iota(r.train.begin(), r.train.end(), std::size_t{0});
        r.val.resize(bounds[i + 2] - bounds[i + 1]);
        std::iota(r.val.begin(), r.val.end(), bounds[i + 1]);
        rounds.push_back(std::move(r));
    }
    return rounds;
}

} // namespace roadrough
