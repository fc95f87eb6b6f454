#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "roadrough/geoalign/align.hpp"
#include "roadrough/geoalign/interpolate.hpp"
#include "roadrough/geoalign/map_match.hpp"
#include "roadrough/geoalign/network.hpp"
#include "roadrough/geoalign/windows.hpp"
#include "roadrough/simkit/iri.hpp"
#include "roadrough/simkit/profile.hpp"
#include "roadrough/simkit/telemetry.hpp"
#include "support/grid.hpp"

using namespace roadrough;
using namespace roadrough::geoalign;

namespace {

std::vector<GpsFix> drive_fixes(const Polyline& path, double speed, double noise_axis, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, noise_axis);
    std::vector<GpsFix> out;
    for (double t = 0.0; speed * t <= path.length(); t += 1.0) {
        auto p = path.at(speed * t);
        if (noise_axis > 0) p = offset(p, n(rng), n(rng));
        out.push_back({t, p});
    }
    return out;
}

std::size_t lcs(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b)
{
    std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
    return t[a.size()][b.size()];
}

bool shares_node(const RoadNetwork& net, std::size_t e1, std::size_t e2)
{
    const auto& a = net.edge(e1);
    const auto& b = net.edge(e2);
    return a.a == b.a || a.a == b.b || a.b == b.a || a.b == b.b;
}

} // namespace

TEST(RoadNetwork, RejectsInconsistentEdgeLength)
{
    RoadNetwork net;
    net.add_node(1, test::kGridOrigin);
    net.add_node(2, offset(test::kGridOrigin, 100, 0));
    EXPECT_THROW(net.add_edge(1, 2, 101.0), InvalidInput);
    EXPECT_NO_THROW(net.add_edge(1, 2, 100.3));
    EXPECT_THROW(net.add_edge(1, 3), InvalidInput);
    EXPECT_THROW(net.add_node(2, test::kGridOrigin), InvalidInput);
}

TEST(RoadNetwork, DetectsDisconnectedGraph)
{
    auto net = test::make_grid(2, 2, 100);
    net.add_node(99, offset(test::kGridOrigin, 1000, 1000));
    net.add_node(98, offset(test::kGridOrigin, 1100, 1000));
    net.add_edge(99, 98);
    EXPECT_FALSE(net.connected());
    EXPECT_THROW(net.validate(), InvalidInput);
}

TEST(RoadNetwork, DijkstraAgreesWithAllPairs)
{
    const auto net = test::make_grid(5, 6, 120, true);
    const auto apsp = test::all_pairs(net);
    for (std::size_t s = 0; s < net.node_count(); ++s) {
        const auto sp = dijkstra(net, s);
        for (std::size_t t = 0; t < net.node_count(); ++t) EXPECT_NEAR(sp.dist[t], apsp[s][t], 1e-9);
    }
}

TEST(MapMatch, NoiselessFixesOnOneEdge)
{
    RoadNetwork net;
    net.add_node(1, test::kGridOrigin);
    net.add_node(2, offset(test::kGridOrigin, 400, 0));
    net.add_node(3, offset(test::kGridOrigin, 0, 400));
    net.add_edge(1, 2);
    net.add_edge(1, 3);
    std::vector<GpsFix> fixes;
    const std::vector<double> truth{20, 80, 140, 200, 260};
    for (std::size_t i = 0; i < truth.size(); ++i)
        fixes.push_back({double(i), offset(test::kGridOrigin, truth[i], 0)});
    const auto m = map_match(fixes, net);
    ASSERT_EQ(m.edge_sequence, std::vector<std::size_t>{0});
    for (std::size_t i = 0; i < truth.size(); ++i) {
        EXPECT_EQ(m.fixes[i].snap.edge, 0u);
        EXPECT_NEAR(m.fixes[i].snap.offset, truth[i], 0.05);
        EXPECT_NEAR(m.fixes[i].snap.distance, 0.0, 1e-6);
    }
}

TEST(MapMatch, ToyGridAmbiguousFixMatchesExhaustiveOracle)
{
    // 2 x 3 lattice without its right-hand vertical edge: 6 edges.
    RoadNetwork net;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 3; ++c) net.add_node(r * 3 + c, offset(test::kGridOrigin, c * 100.0, r * 100.0));
    net.add_edge(0, 1);
    net.add_edge(1, 2);
    net.add_edge(3, 4);
    net.add_edge(4, 5);
    net.add_edge(0, 3);
    net.add_edge(1, 4);
    ASSERT_EQ(net.edge_count(), 6u);
    // Drive along the bottom row; the third fix sits near the middle junction.
    const std::vector<GpsFix> fixes{{0, offset(test::kGridOrigin, 30, 2)},
                                    {1, offset(test::kGridOrigin, 70, -3)},
                                    {2, offset(test::kGridOrigin, 103, 6)},
                                    {3, offset(test::kGridOrigin, 150, 1)}};
    const MatchOptions opt;
    const MapMatcher mm(net, opt);
    std::vector<std::vector<Candidate>> cand;
    for (const auto& f : fixes) cand.push_back(mm.candidates(f.p));
    ASSERT_GT(cand[2].size(), 1u);
    const auto oracle = test::exhaustive_match(net, fixes, cand, opt.sigma, opt.beta);
    const auto m = mm.match(fixes);
    for (std::size_t i = 0; i < fixes.size(); ++i) EXPECT_EQ(m.fixes[i].snap.edge, cand[i][oracle.best[i]].edge);
}

TEST(MapMatch, ViterbiEqualsExhaustiveEnumeration)
{
    const auto net = test::make_grid(3, 4, 80, true);
    MatchOptions opt;
    opt.max_candidates = 5;
    const auto apsp = test::all_pairs(net);
    const MapMatcher mm(net, opt);
    std::size_t checked = 0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        std::mt19937_64 rng(seed);
        const auto drive = test::random_drive(net, 3, seed);
        const std::size_t n_fix = 2 + seed % 5; // 2..6
        std::normal_distribution<double> noise(0.0, 6.0);
        std::vector<GpsFix> fixes;
        for (std::size_t i = 0; i < n_fix; ++i) {
            const double s = drive.path.length() * double(i) / double(n_fix - 1);
            fixes.push_back({double(i) * 4.0, offset(drive.path.at(s), noise(rng), noise(rng))});
        }
        std::vector<std::vector<Candidate>> cand;
        for (const auto& f : fixes) cand.push_back(mm.candidates(f.p));
        const auto oracle = test::exhaustive_match(net, fixes, cand, opt.sigma, opt.beta);
        const auto m = mm.match(fixes);
        std::vector<Candidate> picked;
        for (const auto& f : m.fixes) picked.push_back(f.snap);
        const double got = test::path_score(net, apsp, fixes, picked, opt.sigma, opt.beta);
        EXPECT_NEAR(got, oracle.best_score, 1e-9) << "seed " << seed;
        ++checked;
    }
    EXPECT_EQ(checked, 60u);
}

TEST(MapMatch, NoiselessTracesRecoverExactEdgeSequence)
{
    const auto net = test::make_grid(5, 6, 100, true);
    ASSERT_EQ(net.edge_count(), 50u);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto drive = test::random_drive(net, 12, seed);
        const auto m = map_match(drive_fixes(drive.path, 15.0, 0.0, seed), net);
        EXPECT_EQ(m.edge_sequence, drive.edges) << "seed " << seed;
    }
}

TEST(MapMatch, NoisyTracesRecoverMostEdges)
{
    const auto net = test::make_grid(5, 6, 100, true);
    std::size_t hit = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto drive = test::random_drive(net, 12, 100 + seed);
        // Simulated sensor trace with 3 m GPS noise per axis.
        const auto profile = simkit::generate_profile(drive.path.length(), 0.25, 0.0, seed);
        simkit::SimConfig cfg;
        cfg.speed_profile = simkit::SpeedProfile::constant(15.0);
        cfg.gps_noise_sigma = 3.0 * std::sqrt(2.0);
        cfg.max_substep = 0.02;
        cfg.seed = seed;
        const auto trace = simkit::synthesize_telemetry(profile, drive.path, cfg);
        const auto m = map_match(trace, net);
        hit += lcs(drive.edges, m.edge_sequence);
        total += drive.edges.size();
    }
    EXPECT_GE(double(hit) / double(total), 0.95);
}

TEST(MapMatch, OutputInvariants)
{
    const auto net = test::make_grid(5, 6, 100, true);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto drive = test::random_drive(net, 10, seed);
        const auto m = map_match(drive_fixes(drive.path, 12.0, 4.0, seed), net);
        for (const auto& f : m.fixes) {
            EXPECT_GE(f.snap.offset, 0.0);
            EXPECT_LE(f.snap.offset, net.edge(f.snap.edge).length);
        }
        for (std::size_t i = 1; i < m.edge_sequence.size(); ++i)
            EXPECT_TRUE(shares_node(net, m.edge_sequence[i - 1], m.edge_sequence[i]));
        for (std::size_t i = 1; i < m.fix_chainage.size(); ++i)
            EXPECT_GE(m.fix_chainage[i], m.fix_chainage[i - 1]);
    }
}

TEST(MapMatch, FixFarFromRoadIsReported)
{
    const auto net = test::make_grid(2, 2, 100);
    std::vector<GpsFix> fixes{{0, offset(test::kGridOrigin, 10, 0)}, {1, offset(test::kGridOrigin, 500, 500)}};
    try {
        map_match(fixes, net);
        FAIL() << "expected MatchError";
    } catch (const MatchError& e) {
        EXPECT_NE(std::string(e.what()).find("fix 1"), std::string::npos);
    }
    EXPECT_THROW(map_match(std::vector<GpsFix>{fixes[0]}, net), InvalidInput);
}

TEST(MapMatch, UnreachableCandidatesBreakTheTrace)
{
    // Two parallel roads 30 m apart joined only by a long detour.
    RoadNetwork net;
    net.add_node(0, test::kGridOrigin);
    net.add_node(1, offset(test::kGridOrigin, 200, 0));
    net.add_node(2, offset(test::kGridOrigin, 0, 30));
    net.add_node(3, offset(test::kGridOrigin, 200, 30));
    net.add_node(4, offset(test::kGridOrigin, 3000, 3000));
    net.add_edge(0, 1);
    net.add_edge(2, 3);
    net.add_edge(1, 4);
    net.add_edge(3, 4);
    MatchOptions opt;
    opt.search_radius = 10.0;
    opt.max_detour = 500.0;
    std::vector<GpsFix> fixes{{0, offset(test::kGridOrigin, 50, 0)}, {1, offset(test::kGridOrigin, 60, 30)}};
    EXPECT_THROW(map_match(fixes, net, opt), MatchError);
}

TEST(Interpolate, FixTimesAndMidpoints)
{
    RoadNetwork net;
    net.add_node(0, test::kGridOrigin);
    net.add_node(1, offset(test::kGridOrigin, 100, 0));
    net.add_edge(0, 1);
    const std::vector<GpsFix> fixes{{0.0, offset(test::kGridOrigin, 0, 0)}, {1.0, offset(test::kGridOrigin, 10, 0)}};
    const auto m = map_match(fixes, net);
    TelemetryTrace trace;
    for (double t : {-0.5, 0.0, 0.5, 1.0, 1.5}) trace.push_back({t, 0.0, 10.0, std::nullopt});
    const auto pos = interpolate_positions(trace, m);
    ASSERT_EQ(pos.size(), 3u);
    EXPECT_EQ(pos.dropped, 2u);
    EXPECT_NEAR(great_circle_m(pos.position[0], m.fixes[0].snap.point), 0.0, 1e-9);
    EXPECT_NEAR(great_circle_m(pos.position[2], m.fixes[1].snap.point), 0.0, 1e-9);
    EXPECT_NEAR(great_circle_m(pos.position[1], offset(test::kGridOrigin, 5, 0)), 0.0, 1e-3);

    TelemetryTrace late{{5.0, 0.0, 10.0, std::nullopt}};
    EXPECT_THROW(interpolate_positions(late, m), MatchError);
}

TEST(Interpolate, ChainageIsMonotone)
{
    const auto net = test::make_grid(5, 6, 100, true);
    const auto drive = test::random_drive(net, 8, 7);
    const auto profile = simkit::generate_profile(drive.path.length(), 0.25, 0.0, 1);
    simkit::SimConfig cfg;
    cfg.gps_noise_sigma = 3.0;
    cfg.max_substep = 0.02;
    cfg.speed_profile = simkit::random_speed_profile(drive.path.length(), 100, 8, 20, 3);
    const auto trace = simkit::synthesize_telemetry(profile, drive.path, cfg);
    const auto pos = interpolate_positions(trace, map_match(trace, net));
    for (std::size_t i = 1; i < pos.size(); ++i) EXPECT_GE(pos.chainage[i], pos.chainage[i - 1]);
}

namespace {

struct StraightRun {
    Polyline route;
    TelemetryTrace trace;
    SamplePositions pos;
    std::vector<ReferenceSegment> reference;
};

StraightRun straight_run(double length, double speed, double acc_rate)
{
    StraightRun r;
    r.route = Polyline({test::kGridOrigin, offset(test::kGridOrigin, length * 0.6, length * 0.8)});
    const auto profile = simkit::generate_profile(length, 0.25, 4e-6, 11);
    simkit::SimConfig cfg;
    cfg.speed_profile = simkit::SpeedProfile::constant(speed);
    cfg.acc_rate = acc_rate;
    cfg.gps_rate = acc_rate >= 1.0 ? 1.0 : acc_rate;
    r.trace = simkit::synthesize_telemetry(profile, r.route, cfg);
    const auto net = network_from_route(r.route, 0);
    r.pos = interpolate_positions(r.trace, map_match(r.trace, net));
    r.reference = simkit::build_reference_segments(profile, r.route, 10.0);
    return r;
}

} // namespace

TEST(AlignSegments, RateArithmeticAndNearestSegment)
{
    const auto r = straight_run(1000.0, 20.0, 50.0);
    const auto res = align_segments(r.reference, r.pos, r.trace);
    // The last second after the final fix is not positioned; everything up to it is kept.
    EXPECT_EQ(res.report.dropped_no_nearby + res.report.dropped_too_few, 0u + (r.reference.size() - res.pieces.size()));
    EXPECT_GE(res.pieces.size(), r.reference.size() - 3);
    EXPECT_EQ(res.report.dropped_too_few, 0u);
    for (std::size_t i = 0; i < res.pieces.size(); ++i) {
        const auto n = res.pieces[i].t.size();
        EXPECT_GE(n, 24u);
        EXPECT_LE(n, 26u);
        EXPECT_DOUBLE_EQ(res.pieces[i].iri, r.reference[res.pieces[i].seg_index].iri);
    }

    // Each kept sample is closest to the segment it was assigned to.
    std::map<double, std::size_t> owner;
    for (const auto& p : res.pieces)
        for (double t : p.t) owner[t] = p.seg_index;
    const LocalFrame f(test::kGridOrigin);
    auto seg_distance = [&](const GeoPoint& g, const ReferenceSegment& s) {
        const auto a = f.to_xy(s.start), b = f.to_xy(s.end), q = f.to_xy(g);
        const double dx = b.x - a.x, dy = b.y - a.y;
        const double u = std::clamp(((q.x - a.x) * dx + (q.y - a.y) * dy) / (dx * dx + dy * dy), 0.0, 1.0);
        return std::hypot(q.x - a.x - u * dx, q.y - a.y - u * dy);
    };
    std::size_t checked = 0;
    for (std::size_t k = 0; k < r.pos.size(); ++k) {
        auto it = owner.find(r.pos.t[k]);
        if (it == owner.end()) continue;
        const double mine = seg_distance(r.pos.position[k], r.reference[it->second]);
        for (std::size_t j = 0; j < r.reference.size(); ++j)
            EXPECT_LE(mine, seg_distance(r.pos.position[k], r.reference[j]) + 1e-6);
        ++checked;
    }
    EXPECT_GT(checked, 2000u);
}

TEST(AlignSegments, SparseSamplesAreDropped)
{
    // At 2 Hz and 20 m/s a 10 m segment holds at most one sample.
    const auto r = straight_run(400.0, 20.0, 2.0);
    const auto res = align_segments(r.reference, r.pos, r.trace);
    EXPECT_TRUE(res.pieces.empty());
    EXPECT_GT(res.report.dropped_too_few, 0u);
}

TEST(AlignSegments, SegmentAwayFromTheCarIsCounted)
{
    auto r = straight_run(300.0, 20.0, 50.0);
    ReferenceSegment far{offset(test::kGridOrigin, -500, 0), offset(test::kGridOrigin, -510, 0), 10.0, 1.0};
    r.reference.insert(r.reference.begin() + 5, far);
    const auto res = align_segments(r.reference, r.pos, r.trace);
    EXPECT_GE(res.report.dropped_no_nearby, 1u);
    for (const auto& p : res.pieces) EXPECT_NE(p.seg_index, 5u);
}

namespace {

std::vector<MatchedPiece> pieces_with(const std::vector<double>& iri, std::size_t first = 0)
{
    std::vector<MatchedPiece> out;
    for (std::size_t i = 0; i < iri.size(); ++i) {
        MatchedPiece p;
        p.seg_index = first + i;
        p.iri = iri[i];
        p.t = {double(i), double(i) + 0.5};
        p.acc_z = {0.1, 0.2};
        p.speed = {20, 20};
        out.push_back(p);
    }
    return out;
}

} // namespace

TEST(SlidingWindows, CountsAndLabels)
{
    EXPECT_EQ(sliding_windows(pieces_with(std::vector<double>(12, 1.0))).size(), 3u);
    for (const auto& w : sliding_windows(pieces_with(std::vector<double>(15, 2.7)))) EXPECT_DOUBLE_EQ(w.iri, 2.7);
    const auto w = sliding_windows(pieces_with({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
    ASSERT_EQ(w.size(), 1u);
    EXPECT_DOUBLE_EQ(w[0].iri, 5.5);
    EXPECT_EQ(w[0].n_points, 20u);
    EXPECT_TRUE(sliding_windows(pieces_with(std::vector<double>(9, 1.0))).empty());
}

TEST(SlidingWindows, CountFormulaAndOverlap)
{
    for (std::size_t p = 0; p <= 30; ++p) {
        const auto w = sliding_windows(pieces_with(std::vector<double>(p, 1.0)));
        EXPECT_EQ(w.size(), p >= 10 ? p - 9 : 0u);
        for (std::size_t i = 1; i < w.size(); ++i) {
            EXPECT_EQ(w[i].window_id, w[i - 1].window_id + 1);
            // 9 shared pieces of 2 samples each.
            EXPECT_TRUE(std::equal(w[i].t.begin(), w[i].t.begin() + 18, w[i - 1].t.begin() + 2));
        }
    }
}

TEST(SlidingWindows, GapsAreNotBridged)
{
    auto a = pieces_with(std::vector<double>(12, 1.0));
    auto b = pieces_with(std::vector<double>(11, 2.0), 13); // piece 12 missing
    a.insert(a.end(), b.begin(), b.end());
    const auto w = sliding_windows(a);
    ASSERT_EQ(w.size(), 3u + 2u);
    EXPECT_EQ(w[3].window_id, 13u);
    EXPECT_DOUBLE_EQ(w[3].iri, 2.0);
    std::reverse(a.begin(), a.end());
    EXPECT_THROW(sliding_windows(a), InvalidInput);
}
