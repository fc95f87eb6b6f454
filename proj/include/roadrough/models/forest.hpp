#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "roadrough/models/model.hpp"

namespace roadrough::models {

/// Gini impurity 1 - sum p_c^2 of class counts.
inline double gini(const std::vector<double>& counts)
{
    const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
    if (n <= 0) return 0.0;
    double s = 0.0;
    for (double c : counts) s += (c / n) * (c / n);
    return 1.0 - s;
}

struct TreeOptions {
    int max_depth = 8;
    std::size_t max_features = 0; // 0 = all features at every split
};

/// CART tree: binary splits x[f] <= threshold chosen to maximise the impurity
/// decrease (squared error for regression, Gini for classification).
class DecisionTree {
public:
    struct Node {
        int feature = -1; // -1 for a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;          // leaf mean, or majority class
        std::vector<double> counts;  // class counts (classification leaves)
    };

    /// Grows the tree on the given rows of X (duplicates allowed, as in a
    /// bootstrap sample). `n_classes` = 0 selects regression.
    template <class Rng>
    void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<std::size_t> rows, int n_classes,
             const TreeOptions& opt, Rng& rng)
    {
        nodes_.clear();
        n_classes_ = n_classes;
        const auto d = static_cast<std::size_t>(X.cols());
        const std::size_t mf = opt.max_features == 0 ? d : std::min(opt.max_features, d);
        std::vector<std::size_t> features(d);
        std::iota(features.begin(), features.end(), std::size_t{0});
        grow(X, y, rows, 0, opt.max_depth, mf, features, rng);
    }

    const std::vector<Node>& nodes() const { return nodes_; }
    int n_classes() const { return n_classes_; }

    const Node& leaf(const Eigen::Ref<const Eigen::RowVectorXd>& x) const
    {
        int i = 0;
        while (nodes_[static_cast<std::size_t>(i)].feature >= 0) {
            const auto& n = nodes_[static_cast<std::size_t>(i)];
            i = x(n.feature) <= n.threshold ? n.left : n.right;
        }
        return nodes_[static_cast<std::size_t>(i)];
    }

    int depth() const { return depth_of(0); }

    json save() const
    {
        json j;
        j["n_classes"] = n_classes_;
        std::vector<int> f, l, r;
        std::vector<double> t, v;
        std::vector<std::vector<double>> c;
        for (const auto& n : nodes_) {
            f.push_back(n.feature);
            l.push_back(n.left);
            r.push_back(n.right);
            t.push_back(n.threshold);
            v.push_back(n.value);
            c.push_back(n.counts);
        }
        j["feature"] = f;
        j["threshold"] = t;
        j["left"] = l;
        j["right"] = r;
        j["value"] = v;
        if (n_classes_ > 0) j["counts"] = c;
        return j;
    }

    void load(const json& j)
    {
        n_classes_ = j.at("n_classes").get<int>();
        const auto f = j.at("feature").get<std::vector<int>>();
        const auto t = j.at("threshold").get<std::vector<double>>();
        const auto l = j.at("left").get<std::vector<int>>();
        const auto r = j.at("right").get<std::vector<int>>();
        const auto v = j.at("value").get<std::vector<double>>();
        nodes_.assign(f.size(), Node{});
        for (std::size_t i = 0; i < f.size(); ++i) nodes_[i] = {f[i], t[i], l[i], r[i], v[i], {}};
        if (n_classes_ > 0) {
            const auto c = j.at("counts").get<std::vector<std::vector<double>>>();
            for (std::size_t i = 0; i < c.size(); ++i) nodes_[i].counts = c[i];
        }
    }

private:
    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double gain = 0.0;
    };

    int depth_of(int i) const
    {
        const auto& n = nodes_[static_cast<std::size_t>(i)];
        return n.feature < 0 ? 0 : 1 + std::max(depth_of(n.left), depth_of(n.right));
    }

    Node make_leaf(const Eigen::VectorXd& y, const std::vector<std::size_t>& rows) const
    {
        Node leaf;
        if (n_classes_ == 0) {
            double s = 0.0;
            for (auto r : rows) s += y(static_cast<Eigen::Index>(r));
            leaf.value = s / static_cast<double>(rows.size());
        } else {
            leaf.counts.assign(static_cast<std::size_t>(n_classes_), 0.0);
            for (auto r : rows) leaf.counts[static_cast<std::size_t>(y(static_cast<Eigen::Index>(r)))] += 1.0;
            leaf.value = detail::argmax(leaf.counts);
        }
        return leaf;
    }

    bool pure(const Eigen::VectorXd& y, const std::vector<std::size_t>& rows) const
    {
        const double y0 = y(static_cast<Eigen::Index>(rows.front()));
        return std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return y(static_cast<Eigen::Index>(r)) == y0; });
    }

    // Best threshold on one feature; gain is in "sum of squares" units for
    // regression and in count-weighted Gini units for classification.
    Split best_on_feature(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<std::size_t>& rows,
                          int f) const
    {
        const std::size_t n = rows.size();
        std::vector<std::pair<double, double>> xv(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = static_cast<Eigen::Index>(rows[i]);
            xv[i] = {X(r, f), y(r)};
        }
        std::sort(xv.begin(), xv.end());
        Split best;
        best.feature = -1;
        if (xv.front().first == xv.back().first) return best;
        const double nn = static_cast<double>(n);
        if (n_classes_ == 0) {
            double total = 0.0;
            for (const auto& p : xv) total += p.second;
            const double parent = total * total / nn;
            double left = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left += xv[i].second;
                if (xv[i].first == xv[i + 1].first) continue;
                const double nl = static_cast<double>(i + 1), nr = nn - nl;
                const double right = total - left;
                const double gain = left * left / nl + right * right / nr - parent;
                if (gain > best.gain + kTieTol * std::abs(best.gain))
                    best = {f, threshold(xv[i].first, xv[i + 1].first), gain};
            }
        } else {
            const auto k = static_cast<std::size_t>(n_classes_);
            std::vector<double> total(k, 0.0), left(k, 0.0);
            for (const auto& p : xv) total[static_cast<std::size_t>(p.second)] += 1.0;
            double parent = 0.0;
            for (double c : total) parent += c * c;
            parent /= nn;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left[static_cast<std::size_t>(xv[i].second)] += 1.0;
                if (xv[i].first == xv[i + 1].first) continue;
                const double nl = static_cast<double>(i + 1), nr = nn - nl;
                double sl = 0.0, sr = 0.0;
                for (std::size_t c = 0; c < k; ++c) {
                    sl += left[c] * left[c];
                    sr += (total[c] - left[c]) * (total[c] - left[c]);
                }
                const double gain = sl / nl + sr / nr - parent;
                if (gain > best.gain + kTieTol * std::abs(best.gain))
                    best = {f, threshold(xv[i].first, xv[i + 1].first), gain};
            }
        }
        return best;
    }

    static double threshold(double a, double b)
    {
        const double mid = a + 0.5 * (b - a);
        return mid < b ? mid : a;
    }

    template <class Rng>
    int grow(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<std::size_t>& rows, int depth,
             int max_depth, std::size_t mf, std::vector<std::size_t>& features, Rng& rng)
    {
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(make_leaf(y, rows));
        if (depth >= max_depth || rows.size() < 2 || pure(y, rows)) return id;

        std::vector<std::size_t> cand;
        if (mf >= features.size()) {
            cand = features;
        } else {
            // Partial Fisher-Yates draw, then ascending order so ties favour low indices.
            for (std::size_t i = 0; i < mf; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, features.size() - 1);
                std::swap(features[i], features[pick(rng)]);
            }
            cand.assign(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(mf));
            std::sort(cand.begin(), cand.end());
        }
        Split best;
        for (auto f : cand) {
            const auto s = best_on_feature(X, y, rows, static_cast<int>(f));
            if (s.feature >= 0 && s.gain > best.gain + kTieTol * std::abs(best.gain)) best = s;
        }
        if (best.feature < 0 || !(best.gain > 1e-12 * static_cast<double>(rows.size()))) return id;

        std::vector<std::size_t> lrows, rrows;
        for (auto r : rows)
            (X(static_cast<Eigen::Index>(r), best.feature) <= best.threshold ? lrows : rrows).push_back(r);
        const int l = grow(X, y, lrows, depth + 1, max_depth, mf, features, rng);
        const int r = grow(X, y, rrows, depth + 1, max_depth, mf, features, rng);
        auto& node = nodes_[static_cast<std::size_t>(id)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    // Gains this close count as equal, so the same partition reached through
    // two features (or rounding noise) resolves to the lower feature / threshold.
    static constexpr double kTieTol = 1e-10;

    std::vector<Node> nodes_;
    int n_classes_ = 0;
};

/// Bagged CART ensemble with per-split feature subsampling.
/// Hyperparams: n_trees, max_depth, max_features (count or "sqrt"),
/// bootstrap (1/0), seed.
class RandomForest : public Model {
public:
    RandomForest(Task task, Hyperparams hp) : Model(task, std::move(hp)) {}

    std::string family() const override { return "random_forest"; }
    const std::vector<DecisionTree>& trees() const { return trees_; }

    /// Out-of-bag RMSE (regression) or error rate (classification) from the last fit.
    double oob_error() const { return oob_error_; }

    std::size_t resolve_max_features(std::size_t d) const
    {
        if (!hp_.has("max_features")) return d;
        const auto& v = hp_.at("max_features");
        if (std::holds_alternative<std::string>(v)) {
            const auto s = std::get<std::string>(v);
            detail::require(s == "sqrt", "random_forest: max_features must be a count or 'sqrt'");
            return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));
        }
        const double m = hp_.number("max_features");
        detail::require(m >= 1, "random_forest: max_features must be >= 1");
        return std::min(d, static_cast<std::size_t>(m));
    }

protected:
    void do_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) override
    {
        const auto n_trees = static_cast<std::size_t>(hp_.number_or("n_trees", 100));
        const int max_depth = static_cast<int>(hp_.number_or("max_depth", 8));
        const bool bootstrap = hp_.number_or("bootstrap", 1) != 0;
        detail::require(n_trees >= 1 && max_depth >= 1, "random_forest: n_trees and max_depth must be >= 1");
        TreeOptions opt;
        opt.max_depth = max_depth;
        opt.max_features = resolve_max_features(static_cast<std::size_t>(X.cols()));
        n_classes_ = task_ == Task::Classification ? detail::num_classes(y) : 0;

        std::mt19937_64 rng(static_cast<std::uint64_t>(hp_.number_or("seed", 0)));
        const auto n = static_cast<std::size_t>(X.rows());
        std::uniform_int_distribution<std::size_t> draw(0, n - 1);
        trees_.assign(n_trees, DecisionTree{});

        std::vector<double> oob_sum(n, 0.0), oob_cnt(n, 0.0);
        std::vector<std::vector<double>> oob_votes(n_classes_ > 0 ? n : 0,
                                                   std::vector<double>(static_cast<std::size_t>(n_classes_), 0.0));
        std::vector<char> in_bag(n);
        for (std::size_t t = 0; t < n_trees; ++t) {
            std::vector<std::size_t> rows(n);
            std::fill(in_bag.begin(), in_bag.end(), 0);
            for (std::size_t i = 0; i < n; ++i) {
                rows[i] = bootstrap ? draw(rng) : i;
                in_bag[rows[i]] = 1;
            }
            trees_[t].fit(X, y, std::move(rows), n_classes_, opt, rng);
            for (std::size_t i = 0; i < n; ++i) {
                if (in_bag[i]) continue;
                const auto& leaf = trees_[t].leaf(X.row(static_cast<Eigen::Index>(i)));
                if (n_classes_ > 0)
                    oob_votes[i][static_cast<std::size_t>(leaf.value)] += 1.0;
                else
                    oob_sum[i] += leaf.value;
                oob_cnt[i] += 1.0;
            }
        }
        double err = 0.0, m = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (oob_cnt[i] == 0) continue;
            const double yi = y(static_cast<Eigen::Index>(i));
            if (n_classes_ > 0) {
                err += detail::argmax(oob_votes[i]) != static_cast<int>(yi) ? 1.0 : 0.0;
            } else {
                const double e = oob_sum[i] / oob_cnt[i] - yi;
                err += e * e;
            }
            m += 1.0;
        }
        oob_error_ = m > 0 ? (n_classes_ > 0 ? err / m : std::sqrt(err / m)) : std::nan("");
    }

    Eigen::VectorXd do_predict(const Eigen::MatrixXd& X) const override
    {
        Eigen::VectorXd out(X.rows());
        std::vector<double> votes(static_cast<std::size_t>(std::max(n_classes_, 1)));
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            if (n_classes_ > 0) {
                std::fill(votes.begin(), votes.end(), 0.0);
                for (const auto& t : trees_) votes[static_cast<std::size_t>(t.leaf(X.row(i)).value)] += 1.0;
                out(i) = detail::argmax(votes);
            } else {
                double s = 0.0;
                for (const auto& t : trees_) s += t.leaf(X.row(i)).value;
                out(i) = s / static_cast<double>(trees_.size());
            }
        }
        return out;
    }

    json state() const override
    {
        json j;
        j["n_classes"] = n_classes_;
        j["trees"] = json::array();
        for (const auto& t : trees_) j["trees"].push_back(t.save());
        return j;
    }

    void load_state(const json& j) override
    {
        n_classes_ = j.at("n_classes").get<int>();
        trees_.clear();
        for (const auto& t : j.at("trees")) {
            trees_.emplace_back();
            trees_.back().load(t);
        }
    }

private:
    std::vector<DecisionTree> trees_;
    int n_classes_ = 0;
    double oob_error_ = 0.0;
};

} // namespace roadrough::models
