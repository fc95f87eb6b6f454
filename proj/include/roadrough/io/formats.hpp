#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "roadrough/core/iri_level.hpp"
#include "roadrough/core/types.hpp"
#include "roadrough/geoalign/network.hpp"
#include "roadrough/io/csv.hpp"

namespace roadrough::io {

inline constexpr std::string_view kTelemetryHeader = "t_s,acc_z_ms2,speed_ms,lat,lon";
inline constexpr std::string_view kReferenceHeader = "seg_id,start_lat,start_lon,end_lat,end_lon,length_m,iri_mkm";

// ---- telemetry

inline std::string telemetry_to_csv(const TelemetryTrace& trace)
{
    std::string out(kTelemetryHeader);
    out += '\n';
    for (const auto& s : trace) {
        out += format_number(s.t) + ',' + format_number(s.acc_z) + ',' + format_number(s.speed) + ',';
        if (s.gps) out += format_number(s.gps->lat) + ',' + format_number(s.gps->lon);
        else out += ',';
        out += '\n';
    }
    return out;
}

inline TelemetryTrace telemetry_from_csv(std::string content, const std::string& name = "telemetry")
{
    const CsvTable tab(std::move(content), name);
    tab.expect_header(kTelemetryHeader);
    TelemetryTrace trace;
    trace.reserve(tab.rows());
    for (std::size_t r = 0; r < tab.rows(); ++r) {
        const auto f = tab.row(r, 5);
        const auto w = tab.where(r);
        TelemetrySample s;
        s.t = parse_number(f[0], w);
        s.acc_z = parse_number(f[1], w);
        s.speed = parse_number(f[2], w);
        if (f[3].empty() != f[4].empty()) throw IoError(w + ": lat and lon must both be present or both empty");
        if (!f[3].empty()) s.gps = GeoPoint{parse_number(f[3], w), parse_number(f[4], w)};
        trace.push_back(s);
    }
    try {
        validate_trace(trace);
    } catch (const InvalidInput& e) {
        throw IoError(name + ": " + e.what());
    }
    return trace;
}

inline void save_telemetry(const std::filesystem::path& p, const TelemetryTrace& t) { write_file(p, telemetry_to_csv(t)); }
inline TelemetryTrace load_telemetry(const std::filesystem::path& p) { return telemetry_from_csv(read_file(p), p.string()); }

// ---- reference profiler segments

inline std::string reference_to_csv(const std::vector<ReferenceSegment>& segs)
{
    std::string out(kReferenceHeader);
    out += '\n';
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& s = segs[i];
        out += std::to_string(i) + ',' + format_number(s.start.lat) + ',' + format_number(s.start.lon) + ',' +
               format_number(s.end.lat) + ',' + format_number(s.end.lon) + ',' + format_number(s.length) + ',' +
               format_number(s.iri) + '\n';
    }
    return out;
}

/// Rows must be listed in route order with seg_id 0, 1, 2, ...
inline std::vector<ReferenceSegment> reference_from_csv(std::string content, const std::string& name = "reference")
{
    const CsvTable tab(std::move(content), name);
    tab.expect_header(kReferenceHeader);
    std::vector<ReferenceSegment> segs;
    segs.reserve(tab.rows());
    for (std::size_t r = 0; r < tab.rows(); ++r) {
        const auto f = tab.row(r, 7);
        const auto w = tab.where(r);
        if (parse_integer(f[0], w) != static_cast<long long>(r))
            throw IoError(w + ": seg_id must be " + std::to_string(r));
        ReferenceSegment s;
        s.start = {parse_number(f[1], w), parse_number(f[2], w)};
        s.end = {parse_number(f[3], w), parse_number(f[4], w)};
        s.length = parse_number(f[5], w);
        s.iri = parse_number(f[6], w);
        if (!is_valid(s.start) || !is_valid(s.end)) throw IoError(w + ": invalid coordinates");
        if (s.length <= 0 || s.iri < 0) throw IoError(w + ": need length_m > 0 and iri_mkm >= 0");
        segs.push_back(s);
    }
    return segs;
}

inline void save_reference(const std::filesystem::path& p, const std::vector<ReferenceSegment>& s)
{
    write_file(p, reference_to_csv(s));
}
inline std::vector<ReferenceSegment> load_reference(const std::filesystem::path& p)
{
    return reference_from_csv(read_file(p), p.string());
}

// ---- road network: "node,<id>,<lat>,<lon>" and "edge,<id_a>,<id_b>,<length_m>"

inline std::string network_to_text(const geoalign::RoadNetwork& net)
{
    std::string out;
    for (std::size_t i = 0; i < net.node_count(); ++i)
        out += "node," + std::to_string(net.node_id(i)) + ',' + format_number(net.node(i).lat) + ',' +
               format_number(net.node(i).lon) + '\n';
    for (const auto& e : net.edges())
        out += "edge," + std::to_string(net.node_id(e.a)) + ',' + std::to_string(net.node_id(e.b)) + ',' +
               format_number(e.length) + '\n';
    return out;
}

/// Nodes may appear anywhere before the edges that use them.
inline geoalign::RoadNetwork network_from_text(const std::string& content, const std::string& name = "network")
{
    geoalign::RoadNetwork net;
    for (const auto& line : split_lines(content)) {
        const auto w = name + " line " + std::to_string(line.number);
        const auto f = split_fields(line.text);
        try {
            if (f[0] == "node" && f.size() == 4) {
                net.add_node(parse_integer(f[1], w), {parse_number(f[2], w), parse_number(f[3], w)});
            } else if (f[0] == "edge" && f.size() == 4) {
                net.add_edge(parse_integer(f[1], w), parse_integer(f[2], w), parse_number(f[3], w));
            } else {
                throw IoError(w + ": expected 'node,<id>,<lat>,<lon>' or 'edge,<a>,<b>,<length_m>'");
            }
        } catch (const InvalidInput& e) {
            throw IoError(w + ": " + e.what());
        }
    }
    if (net.edge_count() == 0) throw IoError(name + ": no edges");
    return net;
}

inline void save_network(const std::filesystem::path& p, const geoalign::RoadNetwork& n) { write_file(p, network_to_text(n)); }
inline geoalign::RoadNetwork load_network(const std::filesystem::path& p) { return network_from_text(read_file(p), p.string()); }

// ---- dataset: one row per window, feature columns then iri_mkm,level

inline std::string dataset_to_csv(const Dataset& d)
{
    d.validate();
    std::string out;
    for (const auto& n : d.feature_names) out += n + ',';
    out += "iri_mkm,level\n";
    for (Eigen::Index r = 0; r < d.X.rows(); ++r) {
        for (Eigen::Index c = 0; c < d.X.cols(); ++c) out += format_number(d.X(r, c)) + ',';
        out += format_number(d.y(r)) + ',' + std::string(to_string(d.level[static_cast<std::size_t>(r)])) + '\n';
    }
    return out;
}

inline Dataset dataset_from_csv(std::string content, const std::string& name = "dataset")
{
    const CsvTable tab(std::move(content), name);
    const auto head = tab.header();
    if (head.size() < 3 || head[head.size() - 2] != "iri_mkm" || head.back() != "level")
        throw IoError(name + ": header must end with 'iri_mkm,level'");
    const std::size_t d = head.size() - 2;
    Dataset ds;
    for (std::size_t c = 0; c < d; ++c) ds.feature_names.emplace_back(head[c]);
    ds.X.resize(static_cast<Eigen::Index>(tab.rows()), static_cast<Eigen::Index>(d));
    ds.y.resize(static_cast<Eigen::Index>(tab.rows()));
    for (std::size_t r = 0; r < tab.rows(); ++r) {
        const auto f = tab.row(r, d + 2);
        const auto w = tab.where(r);
        for (std::size_t c = 0; c < d; ++c)
            ds.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_number(f[c], w);
        ds.y(static_cast<Eigen::Index>(r)) = parse_number(f[d], w);
        try {
            ds.level.push_back(iri_level_from_string(f[d + 1]));
        } catch (const InvalidInput& e) {
            throw IoError(w + ": " + e.what());
        }
    }
    return ds;
}

inline void save_dataset(const std::filesystem::path& p, const Dataset& d) { write_file(p, dataset_to_csv(d)); }
inline Dataset load_dataset(const std::filesystem::path& p) { return dataset_from_csv(read_file(p), p.string()); }

} // namespace roadrough::io
