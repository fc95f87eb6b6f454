#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "roadrough/core/error.hpp"
#include "roadrough/core/geo.hpp"
#include "roadrough/core/polyline.hpp"

namespace roadrough::geoalign {

using NodeId = std::int64_t;

struct Edge {
    std::size_t a = 0; // dense node index
    std::size_t b = 0;
    double length = 0.0; // m
};

/// Road graph with straight edges between geo-referenced nodes. Edges can be
/// travelled in both directions.
class RoadNetwork {
public:
    struct Link {
        std::size_t edge;
        std::size_t other;
    };

    std::size_t add_node(NodeId id, const GeoPoint& p)
    {
        detail::require(is_valid(p), "network: invalid coordinates for node " + std::to_string(id));
        detail::require(!index_.count(id), "network: duplicate node " + std::to_string(id));
        index_[id] = ids_.size();
        ids_.push_back(id);
        points_.push_back(p);
        adjacency_.emplace_back();
        grid_ready_ = false;
        return ids_.size() - 1;
    }

    /// Adds an edge; a non-positive length means "use the great-circle distance".
    std::size_t add_edge(NodeId a, NodeId b, double length = 0.0)
    {
        const std::size_t ia = node_index(a), ib = node_index(b);
        detail::require(ia != ib, "network: self-loop on node " + std::to_string(a));
        const double gc = great_circle_m(points_[ia], points_[ib]);
        if (length <= 0.0) length = gc;
        detail::require(gc > 0.0, "network: zero-length edge " + std::to_string(a) + "-" + std::to_string(b));
        detail::require(std::abs(length - gc) <= 0.005 * gc,
                        "network: edge " + std::to_string(a) + "-" + std::to_string(b) +
                            " length differs from great-circle distance by more than 0.5%");
        edges_.push_back({ia, ib, length});
        adjacency_[ia].push_back({edges_.size() - 1, ib});
        adjacency_[ib].push_back({edges_.size() - 1, ia});
        grid_ready_ = false;
        return edges_.size() - 1;
    }

    std::size_t node_index(NodeId id) const
    {
        auto it = index_.find(id);
        if (it == index_.end()) throw InvalidInput("network: unknown node " + std::to_string(id));
        return it->second;
    }

    std::size_t node_count() const { return ids_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    NodeId node_id(std::size_t i) const { return ids_[i]; }
    const GeoPoint& node(std::size_t i) const { return points_[i]; }
    const Edge& edge(std::size_t e) const { return edges_[e]; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Link>& links(std::size_t node) const { return adjacency_[node]; }

    bool connected() const
    {
        if (ids_.empty()) return true;
        std::vector<bool> seen(ids_.size(), false);
        std::vector<std::size_t> stack{0};
        seen[0] = true;
        std::size_t count = 1;
        while (!stack.empty()) {
            const auto n = stack.back();
            stack.pop_back();
            for (const auto& l : adjacency_[n])
                if (!seen[l.other]) {
                    seen[l.other] = true;
                    ++count;
                    stack.push_back(l.other);
                }
        }
        return count == ids_.size();
    }

    void validate() const
    {
        detail::require(!edges_.empty(), "network: no edges");
        detail::require(connected(), "network: graph is not connected");
    }

    /// Edge indices whose bounding box lies within `radius` m of `p` (superset).
    std::vector<std::size_t> edges_near(const GeoPoint& p, double radius) const
    {
        build_grid();
        const auto q = frame_->to_xy(p);
        const auto c0 = cell_of(q.x - radius, q.y - radius);
        const auto c1 = cell_of(q.x + radius, q.y + radius);
        std::vector<std::size_t> out;
        for (auto cx = c0.first; cx <= c1.first; ++cx)
            for (auto cy = c0.second; cy <= c1.second; ++cy) {
                auto it = grid_.find(key(cx, cy));
                if (it == grid_.end()) continue;
                out.insert(out.end(), it->second.begin(), it->second.end());
            }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    static constexpr double kCell = 100.0; // m
    // Covers the projection distortion of the global frame over tens of km.
    static constexpr double kMargin = 150.0; // m

    static std::int64_t key(std::int64_t cx, std::int64_t cy) { return (cx << 32) ^ (cy & 0xffffffff); }

    std::pair<std::int64_t, std::int64_t> cell_of(double x, double y) const
    {
        return {static_cast<std::int64_t>(std::floor(x / kCell)), static_cast<std::int64_t>(std::floor(y / kCell))};
    }

    void build_grid() const
    {
        if (grid_ready_) return;
        detail::require(!points_.empty(), "network: empty");
        GeoPoint centre{0, 0};
        for (const auto& p : points_) {
            centre.lat += p.lat / static_cast<double>(points_.size());
            centre.lon += p.lon / static_cast<double>(points_.size());
        }
        frame_.emplace(centre);
        grid_.clear();
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            const auto pa = frame_->to_xy(points_[edges_[e].a]);
            const auto pb = frame_->to_xy(points_[edges_[e].b]);
            const double margin = kMargin + 0.01 * edges_[e].length;
            const auto c0 = cell_of(std::min(pa.x, pb.x) - margin, std::min(pa.y, pb.y) - margin);
            const auto c1 = cell_of(std::max(pa.x, pb.x) + margin, std::max(pa.y, pb.y) + margin);
            for (auto cx = c0.first; cx <= c1.first; ++cx)
                for (auto cy = c0.second; cy <= c1.second; ++cy) grid_[key(cx, cy)].push_back(e);
        }
        grid_ready_ = true;
    }

    std::vector<NodeId> ids_;
    std::vector<GeoPoint> points_;
    std::unordered_map<NodeId, std::size_t> index_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Link>> adjacency_;

    mutable bool grid_ready_ = false;
    mutable std::optional<LocalFrame> frame_;
    mutable std::unordered_map<std::int64_t, std::vector<std::size_t>> grid_;
};

/// Shortest-path distances from one node, optionally bounded.
struct ShortestPaths {
    std::vector<double> dist;
    std::vector<std::size_t> via_edge; // edge used to reach each node; npos at the source
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    /// Nodes and edges from the source to `target`, source first.
    std::vector<std::size_t> edge_path(const RoadNetwork& net, std::size_t target) const
    {
        std::vector<std::size_t> path;
        std::size_t n = target;
        while (via_edge[n] != npos) {
            const auto e = via_edge[n];
            path.push_back(e);
            n = net.edge(e).a == n ? net.edge(e).b : net.edge(e).a;
        }
        std::reverse(path.begin(), path.end());
        return path;
    }
};

inline ShortestPaths dijkstra(const RoadNetwork& net, std::size_t source,
                              double bound = std::numeric_limits<double>::infinity())
{
    ShortestPaths sp;
    sp.dist.assign(net.node_count(), std::numeric_limits<double>::infinity());
    sp.via_edge.assign(net.node_count(), ShortestPaths::npos);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    sp.dist[source] = 0.0;
    pq.push({0.0, source});
    while (!pq.empty()) {
        auto [d, n] = pq.top();
        pq.pop();
        if (d > sp.dist[n] || d > bound) continue;
        for (const auto& l : net.links(n)) {
            const double nd = d + net.edge(l.edge).length;
            if (nd < sp.dist[l.other] || (nd == sp.dist[l.other] && l.edge < sp.via_edge[l.other])) {
                const bool improved = nd < sp.dist[l.other];
                sp.dist[l.other] = nd;
                sp.via_edge[l.other] = l.edge;
                if (improved) pq.push({nd, l.other});
            }
        }
    }
    return sp;
}

/// Network whose nodes are the vertices of `route` (ids 0..n-1, edges along
/// the route) plus dead-end side roads branching off every `spur_every`-th
/// interior vertex (ids from 100000).
inline RoadNetwork network_from_route(const Polyline& route, std::size_t spur_every = 2, double spur_length = 250.0,
                                      std::uint64_t seed = 0)
{
    RoadNetwork net;
    const auto& pts = route.points();
    for (std::size_t i = 0; i < pts.size(); ++i) net.add_node(static_cast<NodeId>(i), pts[i]);
    for (std::size_t i = 1; i < pts.size(); ++i) net.add_edge(static_cast<NodeId>(i - 1), static_cast<NodeId>(i));
    if (spur_every == 0) return net;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(50.0, 130.0);
    NodeId next = 100000;
    for (std::size_t i = 1; i + 1 < pts.size(); i += spur_every) {
        const LocalFrame f(pts[i]);
        const auto prev = f.to_xy(pts[i - 1]);
        const double heading = std::atan2(-prev.x, -prev.y); // direction of travel, from north
        const double side = (i / spur_every) % 2 ? 1.0 : -1.0;
        const double h = heading + side * deg2rad(angle(rng));
        net.add_node(next, offset(pts[i], spur_length * std::sin(h), spur_length * std::cos(h)));
        net.add_edge(static_cast<NodeId>(i), next);
        ++next;
    }
    return net;
}

} // namespace roadrough::geoalign
