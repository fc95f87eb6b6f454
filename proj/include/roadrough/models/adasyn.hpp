#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "roadrough/models/model.hpp"

namespace roadrough::models {

struct AdasynResult {
    Eigen::MatrixXd X;                 // originals first, then synthetic rows
    Eigen::VectorXd y;
    std::size_t n_original = 0;
    std::vector<std::size_t> generated; // synthetic rows per class
    std::vector<std::size_t> source;    // seed row of each synthetic row
    std::vector<std::string> warnings;
};

namespace detail {

/// Indices of the k nearest rows to row q among `pool` (q itself excluded),
/// nearest first, ties to the lower index.
inline std::vector<std::size_t> nearest_rows(const Eigen::MatrixXd& X, std::size_t q,
                                             const std::vector<std::size_t>& pool, std::size_t k)
{
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(pool.size());
    for (auto i : pool)
        if (i != q)
            d.emplace_back((X.row(static_cast<Eigen::Index>(i)) - X.row(static_cast<Eigen::Index>(q))).squaredNorm(), i);
    k = std::min(k, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    std::vector<std::size_t> out(k);
    for (std::size_t j = 0; j < k; ++j) out[j] = d[j].second;
    return out;
}

/// Integer shares of `total` proportional to w, summing exactly to total.
/// Remainders are handed out largest first, lower index on ties.
inline std::vector<std::size_t> largest_remainder(const std::vector<double>& w, std::size_t total)
{
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<std::size_t> out(w.size(), 0);
    if (w.empty() || sum <= 0) return out;
    std::vector<std::pair<double, std::size_t>> rem;
    std::size_t given = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double exact = w[i] / sum * static_cast<double>(total);
        out[i] = static_cast<std::size_t>(std::floor(exact));
        given += out[i];
        rem.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t j = 0; given < total; ++j, ++given) ++out[rem[j % rem.size()].second];
    return out;
}

} // namespace detail

/// Adaptive synthetic oversampling of every class below the majority count.
/// Per minority sample, hardness = share of other-class rows among its k
/// nearest neighbours (all classes); the class deficit is split over samples
/// in proportion to hardness, and each synthetic row interpolates towards one
/// of the sample's k nearest same-class neighbours.
inline AdasynResult adasyn_resample(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::size_t k_neighbors,
                                    std::uint64_t seed)
{
    detail::require(X.rows() == y.size() && X.rows() > 0, "adasyn: X and y row counts differ or are empty");
    detail::require(k_neighbors >= 1, "adasyn: k_neighbors must be >= 1");
    const int n_cls = detail::num_classes(y);
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(n_cls));
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        detail::require(y(i) >= 0 && y(i) == std::floor(y(i)), "adasyn: class labels must be 0..K-1");
        members[static_cast<std::size_t>(y(i))].push_back(static_cast<std::size_t>(i));
    }
    std::size_t present = 0, majority = 0;
    for (const auto& m : members) {
        present += m.empty() ? 0 : 1;
        majority = std::max(majority, m.size());
    }
    if (present < 2) throw InvalidInput("adasyn: need at least two classes");

    std::vector<std::size_t> all(static_cast<std::size_t>(X.rows()));
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    AdasynResult res;
    res.n_original = static_cast<std::size_t>(X.rows());
    res.generated.assign(static_cast<std::size_t>(n_cls), 0);
    std::vector<Eigen::RowVectorXd> synth;
    std::vector<double> synth_y;

    for (int c = 0; c < n_cls; ++c) {
        const auto& mem = members[static_cast<std::size_t>(c)];
        if (mem.empty() || mem.size() >= majority) continue;
        const std::size_t deficit = majority - mem.size();

        std::vector<double> hard(mem.size());
        for (std::size_t s = 0; s < mem.size(); ++s) {
            const auto nb = detail::nearest_rows(X, mem[s], all, k_neighbors);
            std::size_t other = 0;
            for (auto i : nb) other += static_cast<int>(y(static_cast<Eigen::Index>(i))) != c;
            hard[s] = nb.empty() ? 0.0 : static_cast<double>(other) / static_cast<double>(nb.size());
        }
        if (std::accumulate(hard.begin(), hard.end(), 0.0) <= 0) {
            res.warnings.push_back("adasyn: class " + std::to_string(c) +
                                   " has no other-class neighbours; spreading synthetic rows evenly");
            std::fill(hard.begin(), hard.end(), 1.0);
        }
        const auto share = detail::largest_remainder(hard, deficit);

        const std::size_t k_same = std::min(k_neighbors, mem.size() - 1);
        if (k_same < k_neighbors)
            res.warnings.push_back("adasyn: class " + std::to_string(c) + " has " + std::to_string(mem.size()) +
                                   " rows; k reduced to " + std::to_string(k_same));
        for (std::size_t s = 0; s < mem.size(); ++s) {
            if (share[s] == 0) continue;
            const Eigen::RowVectorXd xi = X.row(static_cast<Eigen::Index>(mem[s]));
            const auto same = detail::nearest_rows(X, mem[s], mem, k_same);
            for (std::size_t g = 0; g < share[s]; ++g) {
                if (same.empty()) {
                    synth.push_back(xi);
                } else {
                    std::uniform_int_distribution<std::size_t> pick(0, same.size() - 1);
                    const std::size_t nb = same[pick(rng)];
                    const double u = unit(rng);
                    synth.push_back(xi + u * (X.row(static_cast<Eigen::Index>(nb)) - xi));
                }
                synth_y.push_back(static_cast<double>(c));
                res.source.push_back(mem[s]);
            }
        }
        res.generated[static_cast<std::size_t>(c)] = deficit;
    }

    res.X.resize(X.rows() + static_cast<Eigen::Index>(synth.size()), X.cols());
    res.y.resize(res.X.rows());
    res.X.topRows(X.rows()) = X;
    res.y.head(y.size()) = y;
    for (std::size_t r = 0; r < synth.size(); ++r) {
        res.X.row(X.rows() + static_cast<Eigen::Index>(r)) = synth[r];
        res.y(y.size() + static_cast<Eigen::Index>(r)) = synth_y[r];
    }
    return res;
}

} // namespace roadrough::models
