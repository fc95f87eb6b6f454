#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "roadrough/core/types.hpp"
#include "roadrough/geoalign/align.hpp"
#include "roadrough/geoalign/map_match.hpp"
#include "roadrough/io/csv.hpp"

namespace roadrough::io {

using nlohmann::json;

inline std::string dump(const json& j) { return j.dump(1) + '\n'; }

inline json parse_json(const std::string& content, const std::string& name)
{
    try {
        return json::parse(content);
    } catch (const json::exception& e) {
        throw IoError(name + ": " + e.what());
    }
}

/// Reads a JSON file and converts it; schema errors surface as IoError.
template <class F>
auto load_json_as(const std::filesystem::path& p, F&& convert)
{
    const json j = parse_json(read_file(p), p.string());
    try {
        return convert(j);
    } catch (const json::exception& e) {
        throw IoError(p.string() + ": " + e.what());
    } catch (const InvalidInput& e) {
        throw IoError(p.string() + ": " + e.what());
    }
}

// ---- matched trace

inline json to_json(const geoalign::MatchedTrace& m)
{
    json fixes = json::array();
    for (const auto& f : m.fixes)
        fixes.push_back({{"t", f.t},
                         {"edge", f.snap.edge},
                         {"offset_m", f.snap.offset},
                         {"lat", f.snap.point.lat},
                         {"lon", f.snap.point.lon},
                         {"distance_m", f.snap.distance}});
    json path = json::array();
    for (const auto& p : m.path.points()) path.push_back({p.lat, p.lon});
    return {{"fixes", fixes}, {"edge_sequence", m.edge_sequence}, {"path", path}, {"fix_chainage", m.fix_chainage}};
}

inline geoalign::MatchedTrace matched_from_json(const json& j)
{
    geoalign::MatchedTrace m;
    for (const auto& f : j.at("fixes")) {
        geoalign::MatchedFix mf;
        mf.t = f.at("t").get<double>();
        mf.snap.edge = f.at("edge").get<std::size_t>();
        mf.snap.offset = f.at("offset_m").get<double>();
        mf.snap.point = {f.at("lat").get<double>(), f.at("lon").get<double>()};
        mf.snap.distance = f.at("distance_m").get<double>();
        m.fixes.push_back(mf);
    }
    m.edge_sequence = j.at("edge_sequence").get<std::vector<std::size_t>>();
    std::vector<GeoPoint> pts;
    for (const auto& p : j.at("path")) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    m.path = Polyline(std::move(pts));
    m.fix_chainage = j.at("fix_chainage").get<std::vector<double>>();
    detail::require(m.fix_chainage.size() == m.fixes.size(), "matched trace: one chainage per fix expected");
    return m;
}

inline void save_matched(const std::filesystem::path& p, const geoalign::MatchedTrace& m) { write_file(p, dump(to_json(m))); }
inline geoalign::MatchedTrace load_matched(const std::filesystem::path& p) { return load_json_as(p, matched_from_json); }

// ---- aligned 10 m pieces

inline json to_json(const std::vector<geoalign::MatchedPiece>& pieces)
{
    json arr = json::array();
    for (const auto& p : pieces)
        arr.push_back({{"seg_id", p.seg_index}, {"iri_mkm", p.iri}, {"t_s", p.t}, {"acc_z_ms2", p.acc_z}, {"speed_ms", p.speed}});
    return arr;
}

inline std::vector<geoalign::MatchedPiece> pieces_from_json(const json& j)
{
    std::vector<geoalign::MatchedPiece> out;
    for (const auto& e : j) {
        geoalign::MatchedPiece p;
        p.seg_index = e.at("seg_id").get<std::size_t>();
        p.iri = e.at("iri_mkm").get<double>();
        p.t = e.at("t_s").get<std::vector<double>>();
        p.acc_z = e.at("acc_z_ms2").get<std::vector<double>>();
        p.speed = e.at("speed_ms").get<std::vector<double>>();
        detail::require(p.acc_z.size() == p.t.size() && p.speed.size() == p.t.size(),
                        "piece " + std::to_string(p.seg_index) + ": channel lengths differ");
        detail::require(p.iri >= 0, "piece " + std::to_string(p.seg_index) + ": negative IRI");
        out.push_back(std::move(p));
    }
    return out;
}

/// One piece per line keeps the file diffable without indenting every sample.
inline std::string pieces_to_text(const std::vector<geoalign::MatchedPiece>& pieces)
{
    std::string out = "[\n";
    const json arr = to_json(pieces);
    for (std::size_t i = 0; i < arr.size(); ++i) out += arr[i].dump() + (i + 1 < arr.size() ? ",\n" : "\n");
    return out + "]\n";
}

inline void save_pieces(const std::filesystem::path& p, const std::vector<geoalign::MatchedPiece>& pieces)
{
    write_file(p, pieces_to_text(pieces));
}
inline std::vector<geoalign::MatchedPiece> load_pieces(const std::filesystem::path& p)
{
    return load_json_as(p, pieces_from_json);
}

} // namespace roadrough::io
