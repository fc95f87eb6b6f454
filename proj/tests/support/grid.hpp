#pragma once

// Toy road networks, drives over them and an exhaustive path-scoring oracle
// for the map matcher.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "roadrough/core/geo.hpp"
#include "roadrough/core/polyline.hpp"
#include "roadrough/geoalign/map_match.hpp"
#include "roadrough/geoalign/network.hpp"

namespace test {

using roadrough::GeoPoint;
using roadrough::geoalign::RoadNetwork;

inline const GeoPoint kGridOrigin{48.137, 11.575};

/// rows x cols lattice with `spacing` m between neighbours; node id r*cols+c.
inline RoadNetwork make_grid(int rows, int cols, double spacing, bool one_diagonal = false)
{
    RoadNetwork net;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            net.add_node(r * cols + c, roadrough::offset(kGridOrigin, c * spacing, r * spacing));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c + 1 < cols; ++c) net.add_edge(r * cols + c, r * cols + c + 1);
    for (int r = 0; r + 1 < rows; ++r)
        for (int c = 0; c < cols; ++c) net.add_edge(r * cols + c, (r + 1) * cols + c);
    if (one_diagonal) net.add_edge(0, cols + 1);
    return net;
}

struct Drive {
    std::vector<std::size_t> nodes; // dense indices
    std::vector<std::size_t> edges;
    roadrough::Polyline path;
};

/// Random walk over `n_edges` edges that never turns straight back.
inline Drive random_drive(const RoadNetwork& net, std::size_t n_edges, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    Drive d;
    d.nodes.push_back(std::uniform_int_distribution<std::size_t>(0, net.node_count() - 1)(rng));
    while (d.edges.size() < n_edges) {
        std::vector<RoadNetwork::Link> options;
        for (const auto& l : net.links(d.nodes.back()))
            if (d.edges.empty() || l.edge != d.edges.back()) options.push_back(l);
        const auto& l = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
        d.edges.push_back(l.edge);
        d.nodes.push_back(l.other);
    }
    std::vector<GeoPoint> pts;
    for (auto n : d.nodes) pts.push_back(net.node(n));
    d.path = roadrough::Polyline(pts);
    return d;
}

/// All-pairs network distances by Floyd-Warshall.
inline std::vector<std::vector<double>> all_pairs(const RoadNetwork& net)
{
    const auto n = net.node_count();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
    for (const auto& e : net.edges()) {
        d[e.a][e.b] = std::min(d[e.a][e.b], e.length);
        d[e.b][e.a] = std::min(d[e.b][e.a], e.length);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

struct OracleResult {
    double best_score = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best; // candidate index per fix
};

using roadrough::geoalign::Candidate;
using roadrough::geoalign::GpsFix;

/// Scores every candidate sequence directly: Gaussian emission, exponential
/// penalty on |route - straight-line| distance.
inline double path_score(const RoadNetwork& net, const std::vector<std::vector<double>>& apsp,
                         const std::vector<GpsFix>& fixes, const std::vector<Candidate>& seq, double sigma,
                         double beta)
{
    double s = 0.0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        s += -seq[i].distance * seq[i].distance / (2 * sigma * sigma);
        if (i == 0) continue;
        const auto& a = seq[i - 1];
        const auto& b = seq[i];
        double route;
        if (a.edge == b.edge) {
            route = std::abs(a.offset - b.offset);
        } else {
            const auto& ea = net.edge(a.edge);
            const auto& eb = net.edge(b.edge);
            const double da[2] = {a.offset, ea.length - a.offset};
            const double db[2] = {b.offset, eb.length - b.offset};
            const std::size_t na[2] = {ea.a, ea.b};
            const std::size_t nb[2] = {eb.a, eb.b};
            route = std::numeric_limits<double>::infinity();
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y) route = std::min(route, da[x] + apsp[na[x]][nb[y]] + db[y]);
        }
        const double gc = roadrough::great_circle_m(fixes[i - 1].p, fixes[i].p);
        s += -std::abs(route - gc) / beta;
    }
    return s;
}

inline OracleResult exhaustive_match(const RoadNetwork& net, const std::vector<GpsFix>& fixes,
                                     const std::vector<std::vector<Candidate>>& cand, double sigma, double beta)
{
    const auto apsp = all_pairs(net);
    OracleResult out;
    std::vector<std::size_t> idx(fixes.size(), 0);
    while (true) {
        std::vector<Candidate> seq;
        for (std::size_t i = 0; i < fixes.size(); ++i) seq.push_back(cand[i][idx[i]]);
        const double s = path_score(net, apsp, fixes, seq, sigma, beta);
        if (s > out.best_score) {
            out.best_score = s;
            out.best = idx;
        }
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == cand[i].size()) idx[i++] = 0;
        if (i == idx.size()) break;
    }
    return out;
}

} // namespace test
