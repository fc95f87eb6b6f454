#pragma once

#include <vector>

#include "roadrough/core/error.hpp"
#include "roadrough/core/types.hpp"
#include "roadrough/geoalign/align.hpp"

namespace roadrough::geoalign {

inline constexpr std::size_t kPiecesPerWindow = 10;

/// Windows of `width` consecutive pieces, advancing one piece at a time.
/// A window never spans a missing piece. The label is the plain mean of the
/// piece IRIs and the channels are the concatenated samples.
inline std::vector<AlignedSegment> sliding_windows(const std::vector<MatchedPiece>& pieces,
                                                   std::size_t width = kPiecesPerWindow)
{
    roadrough::detail::require(width > 0, "sliding_windows: width must be > 0");
    for (std::size_t i = 1; i < pieces.size(); ++i)
        roadrough::detail::require(pieces[i].seg_index > pieces[i - 1].seg_index,
                                   "sliding_windows: pieces are not in route order");
    std::vector<AlignedSegment> out;
    std::size_t run_start = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (i > 0 && pieces[i].seg_index != pieces[i - 1].seg_index + 1) run_start = i;
        if (i + 1 < run_start + width) continue;
        const std::size_t first = i + 1 - width;
        AlignedSegment w;
        w.window_id = pieces[first].seg_index;
        double iri = 0.0;
        for (std::size_t k = first; k <= i; ++k) {
            const auto& p = pieces[k];
            iri += p.iri;
            w.t.insert(w.t.end(), p.t.begin(), p.t.end());
            w.acc_z.insert(w.acc_z.end(), p.acc_z.begin(), p.acc_z.end());
            w.speed.insert(w.speed.end(), p.speed.begin(), p.speed.end());
        }
        w.iri = iri / static_cast<double>(width);
        w.n_points = w.t.size();
        out.push_back(std::move(w));
    }
    return out;
}

} // namespace roadrough::geoalign
