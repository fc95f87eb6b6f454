#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "roadrough/core/error.hpp"
#include "roadrough/core/types.hpp"

namespace roadrough::models {

using nlohmann::json;

namespace detail {
using roadrough::detail::require;
}

enum class Task { Regression, Classification };

inline std::string to_string(Task t) { return t == Task::Regression ? "regression" : "classification"; }

inline Task task_from_string(const std::string& s)
{
    if (s == "regression") return Task::Regression;
    if (s == "classification") return Task::Classification;
    throw InvalidInput("unknown task '" + s + "'");
}

/// Supervised model. Regression targets are real; classification targets are
/// class indices 0..K-1 stored as doubles, and predictions follow the same
/// convention.
class Model {
public:
    Model(Task task, Hyperparams hp) : task_(task), hp_(std::move(hp)) {}
    virtual ~Model() = default;

    virtual std::string family() const = 0;
    Task task() const { return task_; }
    const Hyperparams& hyperparams() const { return hp_; }
    bool fitted() const { return n_features_ > 0; }
    std::size_t n_features() const { return n_features_; }

    void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y)
    {
        detail::require(X.rows() > 0 && X.cols() > 0, family() + ": empty training matrix");
        detail::require(X.rows() == y.size(), family() + ": X and y row counts differ");
        detail::require(X.allFinite() && y.allFinite(), family() + ": non-finite training data");
        if (task_ == Task::Classification)
            for (Eigen::Index i = 0; i < y.size(); ++i)
                detail::require(y(i) >= 0 && y(i) == std::floor(y(i)), family() + ": class labels must be 0..K-1");
        do_fit(X, y);
        n_features_ = static_cast<std::size_t>(X.cols());
    }

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const
    {
        detail::require(fitted(), family() + ": predict before fit");
        detail::require(static_cast<std::size_t>(X.cols()) == n_features_,
                        family() + ": feature count differs from training");
        return do_predict(X);
    }

    json save() const
    {
        json j;
        j["n_features"] = n_features_;
        j["state"] = state();
        return j;
    }

    void load(const json& j)
    {
        n_features_ = j.at("n_features").get<std::size_t>();
        load_state(j.at("state"));
    }

protected:
    virtual void do_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) = 0;
    virtual Eigen::VectorXd do_predict(const Eigen::MatrixXd& X) const = 0;
    virtual json state() const = 0;
    virtual void load_state(const json& j) = 0;

    Task task_;
    Hyperparams hp_;
    std::size_t n_features_ = 0;
};

namespace detail {

inline std::span<const double> as_span(const Eigen::VectorXd& v)
{
    return {v.data(), static_cast<std::size_t>(v.size())};
}

inline std::vector<int> labels_of(const Eigen::VectorXd& y)
{
    std::vector<int> out(static_cast<std::size_t>(y.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i) out[static_cast<std::size_t>(i)] = static_cast<int>(y(i));
    return out;
}

inline int num_classes(const Eigen::VectorXd& y) { return std::max(2, static_cast<int>(y.maxCoeff()) + 1); }

/// Index of the largest entry; ties go to the lower index.
template <class Vec>
inline int argmax(const Vec& v)
{
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

inline json to_json(const Eigen::MatrixXd& m)
{
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    std::vector<double> v(static_cast<std::size_t>(m.size()));
    Eigen::Map<Eigen::MatrixXd>(v.data(), m.rows(), m.cols()) = m;
    j["data"] = v;
    return j;
}

inline Eigen::MatrixXd matrix_from_json(const json& j)
{
    const auto r = j.at("rows").get<Eigen::Index>();
    const auto c = j.at("cols").get<Eigen::Index>();
    const auto v = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(v.size()) != r * c) throw IoError("model state: matrix size mismatch");
    return Eigen::Map<const Eigen::MatrixXd>(v.data(), r, c);
}

inline json to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Eigen::VectorXd vector_from_json(const json& j)
{
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Eigen::MatrixXd rows_of(const Eigen::MatrixXd& X, const std::vector<std::size_t>& idx)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), X.cols());
    for (std::size_t r = 0; r < idx.size(); ++r)
        out.row(static_cast<Eigen::Index>(r)) = X.row(static_cast<Eigen::Index>(idx[r]));
    return out;
}

inline Eigen::VectorXd rows_of(const Eigen::VectorXd& y, const std::vector<std::size_t>& idx)
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) out(static_cast<Eigen::Index>(r)) = y(static_cast<Eigen::Index>(idx[r]));
    return out;
}

} // namespace detail
} // namespace roadrough::models
