#pragma once

#include <array>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "roadrough/core/error.hpp"
#include "roadrough/core/geo.hpp"

namespace roadrough {

struct TelemetrySample {
    double t = 0.0;     // s since trace start
    double acc_z = 0.0; // m/s^2, vertical
    double speed = 0.0; // m/s
    std::optional<GeoPoint> gps;
};

using TelemetryTrace = std::vector<TelemetrySample>;

inline void validate_trace(const TelemetryTrace& trace)
{
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& s = trace[i];
        detail::require(s.speed >= 0.0, "telemetry: negative speed at row " + std::to_string(i));
        if (i > 0)
            detail::require(s.t > trace[i - 1].t,
                            "telemetry: timestamps not strictly increasing at row " + std::to_string(i));
        if (s.gps)
            detail::require(is_valid(*s.gps), "telemetry: invalid GPS fix at row " + std::to_string(i));
    }
}

/// One profiler reading: IRI over a short geo-referenced stretch.
struct ReferenceSegment {
    GeoPoint start;
    GeoPoint end;
    double length = 0.0; // m
    double iri = 0.0;    // m/km
};

/// A road window holding sensor channels and its averaged IRI label.
struct AlignedSegment {
    std::size_t window_id = 0;
    std::vector<double> t; // s
    std::vector<double> acc_z;
    std::vector<double> speed;
    double iri = 0.0; // m/km
    std::size_t n_points = 0;
};

enum class IriLevel : int { Low = 0, Medium = 1, High = 2 };

inline constexpr std::size_t kNumIriLevels = 3;
inline constexpr std::array<IriLevel, kNumIriLevels> kAllIriLevels{IriLevel::Low, IriLevel::Medium,
                                                                   IriLevel::High};

inline std::string_view to_string(IriLevel l)
{
    switch (l) {
    case IriLevel::Low: return "Low";
    case IriLevel::Medium: return "Medium";
    case IriLevel::High: return "High";
    }
    return "?";
}

inline IriLevel iri_level_from_string(std::string_view s)
{
    if (s == "Low") return IriLevel::Low;
    if (s == "Medium") return IriLevel::Medium;
    if (s == "High") return IriLevel::High;
    throw InvalidInput("unknown IRI level '" + std::string(s) + "'");
}

inline int index_of(IriLevel l) { return static_cast<int>(l); }
inline IriLevel level_at(int i) { return static_cast<IriLevel>(i); }

/// Feature matrix with continuous and ordinal targets. Rows are in route order.
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<IriLevel> level;
    std::vector<std::string> feature_names;

    std::size_t rows() const { return static_cast<std::size_t>(X.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(X.cols()); }

    void validate() const
    {
        detail::require(static_cast<std::size_t>(y.size()) == rows() && level.size() == rows(),
                        "dataset: row count mismatch between X, y and level");
        detail::require(feature_names.size() == cols(), "dataset: feature name count mismatch");
        detail::require(X.allFinite() && y.allFinite(), "dataset: non-finite entries");
    }

    /// Rows in [begin, end).
    Dataset slice(std::size_t begin, std::size_t end) const
    {
        Dataset d;
        const auto n = static_cast<Eigen::Index>(end - begin);
        d.X = X.middleRows(static_cast<Eigen::Index>(begin), n);
        d.y = y.segment(static_cast<Eigen::Index>(begin), n);
        d.level.assign(level.begin() + static_cast<std::ptrdiff_t>(begin),
                       level.begin() + static_cast<std::ptrdiff_t>(end));
        d.feature_names = feature_names;
        return d;
    }

    Dataset select_rows(const std::vector<std::size_t>& idx) const
    {
        Dataset d;
        d.X.resize(static_cast<Eigen::Index>(idx.size()), X.cols());
        d.y.resize(static_cast<Eigen::Index>(idx.size()));
        d.level.reserve(idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r) {
            const auto i = static_cast<Eigen::Index>(idx[r]);
            d.X.row(static_cast<Eigen::Index>(r)) = X.row(i);
            d.y(static_cast<Eigen::Index>(r)) = y(i);
            d.level.push_back(level[idx[r]]);
        }
        d.feature_names = feature_names;
        return d;
    }

    Dataset select_cols(const std::vector<std::size_t>& cols_idx) const
    {
        Dataset d;
        d.X.resize(X.rows(), static_cast<Eigen::Index>(cols_idx.size()));
        for (std::size_t c = 0; c < cols_idx.size(); ++c)
            d.X.col(static_cast<Eigen::Index>(c)) = X.col(static_cast<Eigen::Index>(cols_idx[c]));
        d.y = y;
        d.level = level;
        for (auto c : cols_idx) d.feature_names.push_back(feature_names[c]);
        return d;
    }
};

/// Hyperparameter value: scalar, named choice, or integer list (layer sizes).
using HyperValue = std::variant<double, std::string, std::vector<int>>;

/// Ordered name → value map for one model configuration.
class Hyperparams {
public:
    Hyperparams() = default;
    Hyperparams(std::initializer_list<std::pair<const std::string, HyperValue>> init) : values_(init) {}

    Hyperparams& set(const std::string& name, HyperValue v)
    {
        values_[name] = std::move(v);
        return *this;
    }

    bool has(const std::string& name) const { return values_.count(name) != 0; }

    double number(const std::string& name) const
    {
        const auto& v = at(name);
        if (const auto* d = std::get_if<double>(&v)) return *d;
        throw InvalidInput("hyperparameter '" + name + "' is not numeric");
    }

    double number_or(const std::string& name, double fallback) const
    {
        return has(name) ? number(name) : fallback;
    }

    std::string choice(const std::string& name) const
    {
        const auto& v = at(name);
        if (const auto* s = std::get_if<std::string>(&v)) return *s;
        throw InvalidInput("hyperparameter '" + name + "' is not a choice");
    }

    std::vector<int> int_list(const std::string& name) const
    {
        const auto& v = at(name);
        if (const auto* l = std::get_if<std::vector<int>>(&v)) return *l;
        throw InvalidInput("hyperparameter '" + name + "' is not a list");
    }

    const HyperValue& at(const std::string& name) const
    {
        auto it = values_.find(name);
        if (it == values_.end()) throw InvalidInput("missing hyperparameter '" + name + "'");
        return it->second;
    }

    const std::map<std::string, HyperValue>& values() const { return values_; }

    std::string describe() const
    {
        std::string out;
        for (const auto& [k, v] : values_) {
            if (!out.empty()) out += ' ';
            out += k + '=';
            if (const auto* d = std::get_if<double>(&v)) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%g", *d);
                out += buf;
            } else if (const auto* s = std::get_if<std::string>(&v)) {
                out += *s;
            } else {
                const auto& l = std::get<std::vector<int>>(v);
                out += '(';
                for (std::size_t i = 0; i < l.size(); ++i) out += (i ? "," : "") + std::to_string(l[i]);
                out += ')';
            }
        }
        return out;
    }

    friend bool operator==(const Hyperparams&, const Hyperparams&) = default;

private:
    std::map<std::string, HyperValue> values_;
};

} // namespace roadrough
