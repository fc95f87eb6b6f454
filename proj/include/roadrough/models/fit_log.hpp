#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace roadrough::models {

/// Half-open row range [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const IndexRange&) const = default;
};

/// Collapse sorted indices into maximal contiguous ranges.
inline std::vector<IndexRange> to_ranges(std::vector<std::size_t> idx, std::size_t offset = 0)
{
    std::sort(idx.begin(), idx.end());
    std::vector<IndexRange> out;
    for (auto i : idx) {
        const std::size_t j = i + offset;
        if (!out.empty() && j < out.back().end) continue; // duplicate
        if (!out.empty() && out.back().end == j) ++out.back().end;
        else out.push_back({j, j + 1});
    }
    return out;
}

inline bool overlaps(const std::vector<IndexRange>& a, const std::vector<IndexRange>& b)
{
    for (const auto& x : a)
        for (const auto& y : b)
            if (x.begin < y.end && y.begin < x.end) return true;
    return false;
}

/// One fit (model, scaler, PCA or resampler): the rows it saw and the rows it
/// must not have seen, in dataset row numbers.
struct FitEvent {
    std::string what;
    std::vector<IndexRange> observed;
    std::vector<IndexRange> held_out;

    bool leaked() const { return overlaps(observed, held_out); }
};

class FitLog {
public:
    void record(FitEvent e) { events_.push_back(std::move(e)); }
    const std::vector<FitEvent>& events() const { return events_; }
    void clear() { events_.clear(); }

    std::size_t leaks() const
    {
        return static_cast<std::size_t>(std::count_if(events_.begin(), events_.end(), [](const FitEvent& e) {
            return e.leaked();
        }));
    }

private:
    std::vector<FitEvent> events_;
};

} // namespace roadrough::models
