#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "roadrough/core/error.hpp"
#include "roadrough/core/geo.hpp"
#include "roadrough/core/types.hpp"
#include "roadrough/geoalign/interpolate.hpp"

namespace roadrough::geoalign {

/// Sensor samples that fall on one reference segment.
struct MatchedPiece {
    std::size_t seg_index = 0; // position of the segment in the reference list
    double iri = 0.0;
    std::vector<double> t;
    std::vector<double> acc_z;
    std::vector<double> speed;
};

struct AlignOptions {
    double max_gap = 20.0; // farthest car point still matched to a segment endpoint, m
    std::size_t min_samples = 2;
};

struct AlignReport {
    std::size_t segments = 0;
    std::size_t kept = 0;
    std::size_t dropped_no_nearby = 0;
    std::size_t dropped_too_few = 0;
};

struct AlignResult {
    std::vector<MatchedPiece> pieces;
    AlignReport report;
};

namespace detail {

/// Uniform grid over interpolated car points for nearest-point queries.
class PointGrid {
public:
    PointGrid(const std::vector<GeoPoint>& pts, double cell) : pts_(pts), frame_(pts.front()), cell_(cell)
    {
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto q = frame_.to_xy(pts[i]);
            cells_[key(cell_index(q.x), cell_index(q.y))].push_back(i);
        }
    }

    /// Nearest point with index >= `from` within `radius`; ties go to the
    /// lower index. npos if there is none.
    std::size_t nearest(const GeoPoint& p, double radius, std::size_t from) const
    {
        const auto q = frame_.to_xy(p);
        const double r = 1.05 * radius + 1.0; // slack for frame scale error
        std::size_t best = npos;
        double best_d = std::numeric_limits<double>::infinity();
        for (auto cx = cell_index(q.x - r); cx <= cell_index(q.x + r); ++cx)
            for (auto cy = cell_index(q.y - r); cy <= cell_index(q.y + r); ++cy) {
                auto it = cells_.find(key(cx, cy));
                if (it == cells_.end()) continue;
                for (auto i : it->second) {
                    if (i < from) continue;
                    const double d = great_circle_m(p, pts_[i]);
                    if (d > radius) continue;
                    if (d < best_d || (d == best_d && i < best)) {
                        best_d = d;
                        best = i;
                    }
                }
            }
        return best;
    }

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

private:
    std::int64_t cell_index(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
    static std::int64_t key(std::int64_t cx, std::int64_t cy) { return (cx << 32) ^ (cy & 0xffffffff); }

    const std::vector<GeoPoint>& pts_;
    LocalFrame frame_;
    double cell_;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> cells_;
};

} // namespace detail

/// Cuts the geo-referenced samples into reference segments. Each segment's
/// endpoints are matched to the closest car points (earlier sample on ties,
/// never before the previous segment's start) and the segment takes the
/// samples in [start match, end match).
inline AlignResult align_segments(const std::vector<ReferenceSegment>& reference, const SamplePositions& positions,
                                  const TelemetryTrace& trace, const AlignOptions& opt = {})
{
    roadrough::detail::require(positions.size() > 0, "align_segments: no positioned samples");
    roadrough::detail::require(opt.max_gap > 0, "align_segments: max_gap must be > 0");
    const detail::PointGrid grid(positions.position, std::max(5.0, opt.max_gap));

    AlignResult out;
    out.report.segments = reference.size();
    std::size_t cursor = 0;
    for (std::size_t j = 0; j < reference.size(); ++j) {
        const auto& seg = reference[j];
        const auto is = grid.nearest(seg.start, opt.max_gap, cursor);
        if (is == detail::PointGrid::npos) {
            ++out.report.dropped_no_nearby;
            continue;
        }
        const auto ie = grid.nearest(seg.end, opt.max_gap, is);
        if (ie == detail::PointGrid::npos) {
            ++out.report.dropped_no_nearby;
            continue;
        }
        cursor = is;
        if (ie < is + opt.min_samples) {
            ++out.report.dropped_too_few;
            continue;
        }
        MatchedPiece p;
        p.seg_index = j;
        p.iri = seg.iri;
        for (std::size_t k = is; k < ie; ++k) {
            const auto& s = trace.at(positions.sample[k]);
            p.t.push_back(s.t);
            p.acc_z.push_back(s.acc_z);
            p.speed.push_back(s.speed);
        }
        out.pieces.push_back(std::move(p));
    }
    out.report.kept = out.pieces.size();
    return out;
}

} // namespace roadrough::geoalign
