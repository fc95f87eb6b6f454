#pragma once

#include <algorithm>
#include <vector>

#include "roadrough/core/geo.hpp"

namespace roadrough {

/// Geographic polyline with cumulative great-circle chainage.
class Polyline {
public:
    Polyline() = default;

    explicit Polyline(std::vector<GeoPoint> pts) : points_(std::move(pts))
    {
        chainage_.reserve(points_.size());
        double s = 0.0;
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (i > 0) s += great_circle_m(points_[i - 1], points_[i]);
            chainage_.push_back(s);
        }
    }

    double length() const { return chainage_.empty() ? 0.0 : chainage_.back(); }
    const std::vector<GeoPoint>& points() const { return points_; }
    const std::vector<double>& chainage() const { return chainage_; }
    bool empty() const { return points_.empty(); }

    /// Point at chainage `s`, clamped to the ends.
    GeoPoint at(double s) const
    {
        detail::require(!points_.empty(), "polyline: empty");
        if (s <= 0.0 || points_.size() == 1) return points_.front();
        if (s >= length()) return points_.back();
        auto it = std::upper_bound(chainage_.begin(), chainage_.end(), s);
        const auto i = static_cast<std::size_t>(it - chainage_.begin());
        const double seg = chainage_[i] - chainage_[i - 1];
        const double f = seg > 0 ? (s - chainage_[i - 1]) / seg : 0.0;
        return lerp(points_[i - 1], points_[i], f);
    }

private:
    std::vector<GeoPoint> points_;
    std::vector<double> chainage_;
};

} // namespace roadrough
