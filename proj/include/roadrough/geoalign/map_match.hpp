#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "roadrough/core/error.hpp"
#include "roadrough/core/geo.hpp"
#include "roadrough/core/polyline.hpp"
#include "roadrough/core/types.hpp"
#include "roadrough/geoalign/network.hpp"

namespace roadrough::geoalign {

struct GpsFix {
    double t = 0.0;
    GeoPoint p;
};

/// Rows of the trace that carry a GPS fix, in time order.
inline std::vector<GpsFix> gps_fixes(const TelemetryTrace& trace)
{
    std::vector<GpsFix> out;
    for (const auto& s : trace)
        if (s.gps) out.push_back({s.t, *s.gps});
    return out;
}

struct MatchOptions {
    double sigma = 4.07;          // emission std, m
    double beta = 20.0;           // transition scale, m
    double search_radius = 50.0;  // m
    std::size_t max_candidates = 8;
    double max_detour = 2000.0;   // route distance beyond d_gc + this is unreachable, m

    void validate() const
    {
        detail::require(sigma > 0 && beta > 0, "map_match: sigma and beta must be > 0");
        detail::require(search_radius > 0 && max_candidates > 0, "map_match: empty candidate search");
        detail::require(max_detour > 0, "map_match: max_detour must be > 0");
    }
};

/// Projection of a fix onto an edge.
struct Candidate {
    std::size_t edge = 0;
    double offset = 0.0;   // m from the edge's first node
    GeoPoint point;
    double distance = 0.0; // fix to projection, m
};

struct MatchedFix {
    double t = 0.0;
    Candidate snap;
};

struct MatchedTrace {
    std::vector<MatchedFix> fixes;
    std::vector<std::size_t> edge_sequence; // connected path, consecutive duplicates removed
    Polyline path;                          // geometry travelled from the first to the last snapped fix
    std::vector<double> fix_chainage;       // position of each fix along `path`
};

class MapMatcher {
public:
    static constexpr double kUnreachable = std::numeric_limits<double>::infinity();

    MapMatcher(const RoadNetwork& net, MatchOptions opt) : net_(net), opt_(opt)
    {
        opt_.validate();
        net_.validate();
    }

    const MatchOptions& options() const { return opt_; }

    /// Up to max_candidates projections within the search radius, nearest first.
    std::vector<Candidate> candidates(const GeoPoint& z) const
    {
        const LocalFrame f(z);
        std::vector<Candidate> out;
        for (auto e : net_.edges_near(z, opt_.search_radius)) {
            const auto& edge = net_.edge(e);
            const auto a = f.to_xy(net_.node(edge.a));
            const auto b = f.to_xy(net_.node(edge.b));
            const double dx = b.x - a.x, dy = b.y - a.y;
            const double len2 = dx * dx + dy * dy;
            double u = len2 > 0 ? -(a.x * dx + a.y * dy) / len2 : 0.0;
            u = std::clamp(u, 0.0, 1.0);
            Candidate c;
            c.edge = e;
            c.offset = u * edge.length;
            c.point = lerp(net_.node(edge.a), net_.node(edge.b), u);
            c.distance = great_circle_m(z, c.point);
            if (c.distance <= opt_.search_radius) out.push_back(c);
        }
        std::sort(out.begin(), out.end(), [](const Candidate& x, const Candidate& y) {
            return x.distance != y.distance ? x.distance < y.distance : x.edge < y.edge;
        });
        if (out.size() > opt_.max_candidates) out.resize(opt_.max_candidates);
        return out;
    }

    double emission_log(const Candidate& c) const
    {
        return -c.distance * c.distance / (2.0 * opt_.sigma * opt_.sigma);
    }

    /// Log transition score; -inf when unreachable.
    double transition_log(double route_distance, double gc_distance) const
    {
        if (!std::isfinite(route_distance)) return -std::numeric_limits<double>::infinity();
        return -std::abs(route_distance - gc_distance) / opt_.beta;
    }

    /// Shortest network distance from candidate `a` to candidate `b`.
    double route_distance(const Candidate& a, const Candidate& b, double gc_distance) const
    {
        return route(a, b, gc_distance).distance;
    }

    MatchedTrace match(const std::vector<GpsFix>& fixes) const
    {
        if (fixes.size() < 2) throw InvalidInput("map_match: need at least 2 GPS fixes");
        const std::size_t n = fixes.size();
        std::vector<std::vector<Candidate>> cand(n);
        for (std::size_t i = 0; i < n; ++i) {
            detail::require(is_valid(fixes[i].p), "map_match: invalid fix " + std::to_string(i));
            if (i > 0) detail::require(fixes[i].t > fixes[i - 1].t, "map_match: fix times not increasing");
            cand[i] = candidates(fixes[i].p);
            if (cand[i].empty())
                throw MatchError("map_match: unmatched fix " + std::to_string(i) + " (t=" +
                                 std::to_string(fixes[i].t) + " s): no edge within search radius");
        }

        const double ninf = -std::numeric_limits<double>::infinity();
        std::vector<std::vector<double>> score(n);
        std::vector<std::vector<std::size_t>> back(n);
        score[0].resize(cand[0].size());
        for (std::size_t j = 0; j < cand[0].size(); ++j) score[0][j] = emission_log(cand[0][j]);

        for (std::size_t i = 1; i < n; ++i) {
            const double gc = great_circle_m(fixes[i - 1].p, fixes[i].p);
            const auto table = route_table(cand[i - 1], cand[i], gc);
            score[i].assign(cand[i].size(), ninf);
            back[i].assign(cand[i].size(), 0);
            bool any = false;
            for (std::size_t k = 0; k < cand[i].size(); ++k) {
                double best = ninf;
                std::size_t arg = 0;
                for (std::size_t j = 0; j < cand[i - 1].size(); ++j) {
                    if (score[i - 1][j] == ninf) continue;
                    const double s = score[i - 1][j] + transition_log(table[j][k], gc);
                    if (s > best) {
                        best = s;
                        arg = j;
                    }
                }
                if (best == ninf) continue;
                score[i][k] = best + emission_log(cand[i][k]);
                back[i][k] = arg;
                any = true;
            }
            if (!any)
                throw MatchError("map_match: broken trace between fix " + std::to_string(i - 1) + " and fix " +
                                 std::to_string(i) + ": no connected candidates");
        }

        std::vector<std::size_t> pick(n);
        pick[n - 1] = static_cast<std::size_t>(
            std::max_element(score[n - 1].begin(), score[n - 1].end()) - score[n - 1].begin());
        for (std::size_t i = n - 1; i > 0; --i) pick[i - 1] = back[i][pick[i]];

        MatchedTrace out;
        out.fixes.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.fixes.push_back({fixes[i].t, cand[i][pick[i]]});
        build_path(out, fixes);
        return out;
    }

private:
    struct Route {
        double distance = kUnreachable;
        std::vector<std::size_t> nodes; // intermediate nodes, in travel order
        double head = 0.0;              // travel on the first candidate's edge
        double tail = 0.0;              // travel on the second candidate's edge
    };

    // Ends of candidate c: (node, distance from the projection to it).
    std::array<std::pair<std::size_t, double>, 2> ends(const Candidate& c) const
    {
        const auto& e = net_.edge(c.edge);
        return {{{e.a, c.offset}, {e.b, std::max(0.0, e.length - c.offset)}}};
    }

    Route route(const Candidate& a, const Candidate& b, double gc) const
    {
        std::map<std::size_t, ShortestPaths> sp;
        return route_with(a, b, gc, sp);
    }

    Route route_with(const Candidate& a, const Candidate& b, double gc,
                     std::map<std::size_t, ShortestPaths>& sp) const
    {
        Route best;
        if (a.edge == b.edge) {
            best.distance = std::abs(b.offset - a.offset);
            return best;
        }
        const double bound = gc + opt_.max_detour;
        std::size_t from = 0, to = 0;
        for (const auto& [na, da] : ends(a)) {
            auto it = sp.find(na);
            if (it == sp.end()) it = sp.emplace(na, dijkstra(net_, na, bound)).first;
            for (const auto& [nb, db] : ends(b)) {
                const double d = da + it->second.dist[nb] + db;
                if (d < best.distance && d <= bound) {
                    best.distance = d;
                    best.head = da;
                    best.tail = db;
                    from = na;
                    to = nb;
                }
            }
        }
        if (!std::isfinite(best.distance)) return best;
        std::size_t n = from;
        best.nodes.push_back(from);
        for (auto e : sp.at(from).edge_path(net_, to)) {
            n = net_.edge(e).a == n ? net_.edge(e).b : net_.edge(e).a;
            best.nodes.push_back(n);
        }
        return best;
    }

    std::vector<std::vector<double>> route_table(const std::vector<Candidate>& prev,
                                                 const std::vector<Candidate>& next, double gc) const
    {
        std::map<std::size_t, ShortestPaths> sp;
        std::vector<std::vector<double>> t(prev.size(), std::vector<double>(next.size()));
        for (std::size_t j = 0; j < prev.size(); ++j)
            for (std::size_t k = 0; k < next.size(); ++k) t[j][k] = route_with(prev[j], next[k], gc, sp).distance;
        return t;
    }

    void build_path(MatchedTrace& out, const std::vector<GpsFix>& fixes) const
    {
        // Only edges with actual travel enter the sequence, so a fix sitting
        // on a node does not drag in the other edges that touch it.
        constexpr double kMinTravel = 1e-3; // m
        std::vector<GeoPoint> pts{out.fixes[0].snap.point};
        std::vector<std::size_t> fix_vertex{0};
        out.edge_sequence.clear();
        auto push_edge = [&](std::size_t e) {
            if (out.edge_sequence.empty() || out.edge_sequence.back() != e) out.edge_sequence.push_back(e);
        };
        auto edge_between = [&](std::size_t u, std::size_t v) {
            std::size_t best = ShortestPaths::npos;
            for (const auto& l : net_.links(u))
                if (l.other == v && (best == ShortestPaths::npos || net_.edge(l.edge).length < net_.edge(best).length))
                    best = l.edge;
            return best;
        };
        for (std::size_t i = 1; i < out.fixes.size(); ++i) {
            const auto& a = out.fixes[i - 1].snap;
            const auto& b = out.fixes[i].snap;
            const auto r = route(a, b, great_circle_m(fixes[i - 1].p, fixes[i].p));
            if (a.edge == b.edge) {
                if (r.distance > kMinTravel) push_edge(a.edge);
            } else if (r.head > kMinTravel) {
                push_edge(a.edge);
            }
            for (std::size_t k = 0; k < r.nodes.size(); ++k) {
                pts.push_back(net_.node(r.nodes[k]));
                if (k > 0) push_edge(edge_between(r.nodes[k - 1], r.nodes[k]));
            }
            if (a.edge != b.edge && r.tail > kMinTravel) push_edge(b.edge);
            pts.push_back(b.point);
            fix_vertex.push_back(pts.size() - 1);
        }
        if (out.edge_sequence.empty()) out.edge_sequence.push_back(out.fixes[0].snap.edge);
        out.path = Polyline(std::move(pts));
        out.fix_chainage.reserve(fix_vertex.size());
        for (auto v : fix_vertex) out.fix_chainage.push_back(out.path.chainage()[v]);
    }

    const RoadNetwork& net_;
    MatchOptions opt_;
};

/// Most probable edge sequence for `fixes` under the HMM with Gaussian
/// emission and exponential route/straight-line transition scores.
inline MatchedTrace map_match(const std::vector<GpsFix>& fixes, const RoadNetwork& net,
                              const MatchOptions& opt = {})
{
    return MapMatcher(net, opt).match(fixes);
}

inline MatchedTrace map_match(const TelemetryTrace& trace, const RoadNetwork& net, const MatchOptions& opt = {})
{
    return map_match(gps_fixes(trace), net, opt);
}

} // namespace roadrough::geoalign
