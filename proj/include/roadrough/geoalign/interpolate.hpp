#pragma once

#include <vector>

#include "roadrough/core/error.hpp"
#include "roadrough/core/types.hpp"
#include "roadrough/geoalign/map_match.hpp"

namespace roadrough::geoalign {

/// Geo-referenced sensor samples. Samples outside the matched time span are
/// left out and counted in `dropped`.
struct SamplePositions {
    std::vector<std::size_t> sample; // row in the telemetry trace
    std::vector<double> t;
    std::vector<GeoPoint> position;
    std::vector<double> chainage; // along the matched path, m
    std::size_t dropped = 0;

    std::size_t size() const { return sample.size(); }
};

/// Position of every sample bracketed by two snapped fixes, assuming constant
/// speed along the matched path between them.
inline SamplePositions interpolate_positions(const TelemetryTrace& trace, const MatchedTrace& matched)
{
    const auto& fx = matched.fixes;
    detail::require(fx.size() >= 2 && matched.fix_chainage.size() == fx.size(),
                    "interpolate_positions: matched trace needs at least 2 fixes");
    SamplePositions out;
    std::size_t k = 0; // fx[k].t <= t < fx[k+1].t
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double t = trace[i].t;
        if (t < fx.front().t || t > fx.back().t) {
            ++out.dropped;
            continue;
        }
        while (k + 2 < fx.size() && fx[k + 1].t <= t) ++k;
        const double span = fx[k + 1].t - fx[k].t;
        const double f = span > 0 ? (t - fx[k].t) / span : 0.0;
        const double s = matched.fix_chainage[k] + f * (matched.fix_chainage[k + 1] - matched.fix_chainage[k]);
        out.sample.push_back(i);
        out.t.push_back(t);
        out.chainage.push_back(s);
        out.position.push_back(matched.path.at(s));
    }
    if (out.sample.empty())
        throw MatchError("interpolate_positions: no sample lies between the first and last matched fix");
    return out;
}

} // namespace roadrough::geoalign
