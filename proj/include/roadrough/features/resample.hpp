#pragma once

#include <algorithm>
#include <vector>

#include "roadrough/core/error.hpp"
#include "roadrough/core/types.hpp"

namespace roadrough::features {

inline constexpr std::size_t kResampleLength = 250;

/// Linear interpolation of (t, x) at the query times `tq` (within [t0, tN]).
inline std::vector<double> interp(const std::vector<double>& t, const std::vector<double>& x,
                                  const std::vector<double>& tq)
{
    std::vector<double> out(tq.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < tq.size(); ++i) {
        while (k + 2 < t.size() && t[k + 1] <= tq[i]) ++k;
        const double span = t[k + 1] - t[k];
        const double f = std::clamp((tq[i] - t[k]) / span, 0.0, 1.0);
        out[i] = x[k] + f * (x[k + 1] - x[k]);
    }
    return out;
}

/// Every channel linearly interpolated onto `target_len` evenly spaced times
/// between the first and last sample. Endpoints are kept exactly.
inline AlignedSegment resample_segment(const AlignedSegment& seg, std::size_t target_len = kResampleLength)
{
    const std::size_t n = seg.t.size();
    detail::require(target_len >= 2, "resample_segment: target length must be >= 2");
    detail::require(n >= 2, "resample_segment: window " + std::to_string(seg.window_id) + " has fewer than 2 samples");
    detail::require(seg.acc_z.size() == n && seg.speed.size() == n,
                    "resample_segment: channel lengths differ in window " + std::to_string(seg.window_id));
    for (std::size_t i = 1; i < n; ++i)
        detail::require(seg.t[i] > seg.t[i - 1], "resample_segment: time not increasing in window " +
                                                      std::to_string(seg.window_id));

    std::vector<double> tq(target_len);
    const double t0 = seg.t.front(), t1 = seg.t.back();
    for (std::size_t i = 0; i < target_len; ++i)
        tq[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(target_len - 1);
    tq.back() = t1;

    AlignedSegment out;
    out.window_id = seg.window_id;
    out.iri = seg.iri;
    out.acc_z = interp(seg.t, seg.acc_z, tq);
    out.speed = interp(seg.t, seg.speed, tq);
    out.t = std::move(tq);
    out.n_points = target_len;
    return out;
}

} // namespace roadrough::features
