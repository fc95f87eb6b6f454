#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "roadrough/io/artifacts.hpp"
#include "roadrough/models/registry.hpp"
#include "roadrough/pipeline/bundle.hpp"

namespace roadrough::pipeline {

inline constexpr std::array<std::string_view, 7> kStages{"simulate", "match", "align", "featurize",
                                                         "select",   "train", "evaluate"};

struct SimulateConfig {
    double route_length_m = 45000.0;
    GeoPoint origin{55.68, 12.57};
    double dx_m = 0.25;
    double g0_min = 0.8e-6; // m^3, roughness coefficient range (log-uniform per section)
    double g0_max = 50e-6;
    double section_min_m = 100.0;
    double section_max_m = 600.0;
    double speed_min_ms = 8.0;
    double speed_max_ms = 22.0;
    double speed_knot_spacing_m = 200.0;
    double acc_rate_hz = 50.0;
    double gps_rate_hz = 1.0;
    double gps_noise_m = 3.0; // per-axis std
    double acc_noise_ms2 = 0.05;
    double max_substep_s = 0.002;
    std::size_t spur_every = 2;
    double spur_length_m = 250.0;
    double reference_segment_m = 10.0;
};

struct MatchConfig {
    geoalign::MatchOptions options;
};

struct AlignConfig {
    geoalign::AlignOptions options;
    std::size_t window_pieces = 10;
};

struct FeaturizeConfig {
    std::size_t resample_length = 250;
};

struct SelectConfig {
    double train_fraction = 0.8;
    std::size_t k_folds = 5;
    std::size_t max_features = 10;
    std::size_t n_trees = 20;
    int max_depth = 8;
};

struct TrainConfig {
    std::size_t k_folds = 5;
    std::vector<std::string> variants{"sfs", "pca"};
    double pca_variance = 0.99;
    std::vector<std::string> regression_families = models::families_for(models::Task::Regression);
    std::vector<std::string> classification_families = models::families_for(models::Task::Classification);
    bool adasyn = true;
    std::size_t adasyn_k = 5;
    // family -> parameter -> values; replaces the family's default grid
    std::map<std::string, std::vector<std::pair<std::string, std::vector<HyperValue>>>> grids;
};

struct PipelineConfig {
    std::uint64_t seed = 42;
    std::filesystem::path out_dir = "run";
    std::map<std::string, bool> stages; // stage -> enabled; all enabled by default
    // Inputs used when the producing stage is disabled; empty = the artifact in out_dir.
    std::filesystem::path telemetry, reference, network;

    SimulateConfig simulate;
    MatchConfig match;
    AlignConfig align;
    FeaturizeConfig featurize;
    SelectConfig select;
    TrainConfig train;

    PipelineConfig()
    {
        for (auto s : kStages) stages[std::string(s)] = true;
    }

    bool enabled(std::string_view stage) const { return stages.at(std::string(stage)); }

    /// Per-purpose seeds derived from the root seed.
    std::uint64_t seed_for(std::string_view purpose) const
    {
        std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ull;
        for (char c : purpose) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ull;
        return h >> 33; // small enough to print and to store exactly as a double
    }

    std::vector<Hyperparams> grid_for(const std::string& family, models::Task task) const
    {
        auto it = train.grids.find(family);
        auto g = it == train.grids.end() ? models::default_grid(family, task) : models::grid_product(it->second);
        const double s = static_cast<double>(seed_for("model:" + family));
        for (auto& hp : g)
            if (hp.has("seed") || family == "random_forest" || family == "mlp") hp.set("seed", s);
        return g;
    }

    void validate() const
    {
        detail::require(simulate.route_length_m >= 200, "config: simulate.route_length_m must be >= 200");
        detail::require(simulate.dx_m > 0 && simulate.g0_min > 0 && simulate.g0_max >= simulate.g0_min,
                        "config: simulate needs dx_m > 0 and 0 < g0_min <= g0_max");
        detail::require(simulate.speed_min_ms > 0 && simulate.speed_max_ms >= simulate.speed_min_ms,
                        "config: simulate needs 0 < speed_min_ms <= speed_max_ms");
        detail::require(simulate.gps_noise_m >= 0 && simulate.acc_noise_ms2 >= 0, "config: noise must be >= 0");
        match.options.validate();
        detail::require(align.window_pieces >= 1, "config: align.window_pieces must be >= 1");
        detail::require(featurize.resample_length >= 2, "config: featurize.resample_length must be >= 2");
        detail::require(select.train_fraction > 0 && select.train_fraction < 1,
                        "config: select.train_fraction must be in (0, 1)");
        detail::require(select.k_folds >= 2 && train.k_folds >= 2, "config: k_folds must be >= 2");
        for (const auto& v : train.variants)
            detail::require(v == "sfs" || v == "pca", "config: unknown variant '" + v + "' (use sfs or pca)");
        detail::require(!train.variants.empty(), "config: train.variants is empty");
        detail::require(train.pca_variance > 0 && train.pca_variance <= 1, "config: pca_variance must be in (0, 1]");
        for (const auto& f : train.regression_families) models::make_model(f, models::Task::Regression);
        for (const auto& f : train.classification_families) models::make_model(f, models::Task::Classification);
    }
};

namespace detail {

using roadrough::detail::require;

/// Rejects keys outside `allowed` so typos do not silently fall back to defaults.
inline void check_keys(const json& j, const std::string& section, std::initializer_list<std::string_view> allowed)
{
    if (!j.is_object()) throw InvalidInput("config: '" + section + "' must be an object");
    for (const auto& [k, v] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || k == a;
        if (!ok) throw InvalidInput("config: unknown key '" + section + "." + k + "'");
    }
}

template <class T>
void read(const json& j, const char* key, T& out)
{
    if (j.contains(key)) out = j.at(key).get<T>();
}

inline HyperValue hyper_value(const json& v)
{
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) return v.get<std::vector<int>>();
    throw InvalidInput("config: grid values must be numbers, strings or integer lists");
}

} // namespace detail

inline PipelineConfig config_from_json(const json& j, const std::filesystem::path& base = {})
{
    using detail::read;
    PipelineConfig c;
    detail::check_keys(j, "config",
                       {"seed", "out_dir", "stages", "inputs", "simulate", "match", "align", "featurize", "select",
                        "train"});
    read(j, "seed", c.seed);
    if (j.contains("out_dir")) c.out_dir = base / j.at("out_dir").get<std::string>();
    if (j.contains("stages")) {
        const auto& s = j.at("stages");
        detail::check_keys(s, "stages", {"simulate", "match", "align", "featurize", "select", "train", "evaluate"});
        for (const auto& [k, v] : s.items()) c.stages[k] = v.get<bool>();
    }
    if (j.contains("inputs")) {
        const auto& in = j.at("inputs");
        detail::check_keys(in, "inputs", {"telemetry", "reference", "network"});
        auto path = [&](const char* key, std::filesystem::path& out) {
            if (in.contains(key)) out = base / in.at(key).get<std::string>();
        };
        path("telemetry", c.telemetry);
        path("reference", c.reference);
        path("network", c.network);
    }
    if (j.contains("simulate")) {
        const auto& s = j.at("simulate");
        detail::check_keys(s, "simulate",
                           {"route_length_m", "origin", "dx_m", "g0_min", "g0_max", "section_min_m", "section_max_m",
                            "speed_min_ms", "speed_max_ms", "speed_knot_spacing_m", "acc_rate_hz", "gps_rate_hz",
                            "gps_noise_m", "acc_noise_ms2", "max_substep_s", "spur_every", "spur_length_m",
                            "reference_segment_m"});
        auto& o = c.simulate;
        read(s, "route_length_m", o.route_length_m);
        if (s.contains("origin")) o.origin = {s.at("origin").at(0).get<double>(), s.at("origin").at(1).get<double>()};
        read(s, "dx_m", o.dx_m);
        read(s, "g0_min", o.g0_min);
        read(s, "g0_max", o.g0_max);
        read(s, "section_min_m", o.section_min_m);
        read(s, "section_max_m", o.section_max_m);
        read(s, "speed_min_ms", o.speed_min_ms);
        read(s, "speed_max_ms", o.speed_max_ms);
        read(s, "speed_knot_spacing_m", o.speed_knot_spacing_m);
        read(s, "acc_rate_hz", o.acc_rate_hz);
        read(s, "gps_rate_hz", o.gps_rate_hz);
        read(s, "gps_noise_m", o.gps_noise_m);
        read(s, "acc_noise_ms2", o.acc_noise_ms2);
        read(s, "max_substep_s", o.max_substep_s);
        read(s, "spur_every", o.spur_every);
        read(s, "spur_length_m", o.spur_length_m);
        read(s, "reference_segment_m", o.reference_segment_m);
    }
    if (j.contains("match")) {
        const auto& s = j.at("match");
        detail::check_keys(s, "match", {"sigma_m", "beta_m", "search_radius_m", "max_candidates", "max_detour_m"});
        auto& o = c.match.options;
        read(s, "sigma_m", o.sigma);
        read(s, "beta_m", o.beta);
        read(s, "search_radius_m", o.search_radius);
        read(s, "max_candidates", o.max_candidates);
        read(s, "max_detour_m", o.max_detour);
    }
    if (j.contains("align")) {
        const auto& s = j.at("align");
        detail::check_keys(s, "align", {"max_gap_m", "min_samples", "window_pieces"});
        read(s, "max_gap_m", c.align.options.max_gap);
        read(s, "min_samples", c.align.options.min_samples);
        read(s, "window_pieces", c.align.window_pieces);
    }
    if (j.contains("featurize")) {
        const auto& s = j.at("featurize");
        detail::check_keys(s, "featurize", {"resample_length"});
        read(s, "resample_length", c.featurize.resample_length);
    }
    if (j.contains("select")) {
        const auto& s = j.at("select");
        detail::check_keys(s, "select", {"train_fraction", "k_folds", "max_features", "n_trees", "max_depth"});
        read(s, "train_fraction", c.select.train_fraction);
        read(s, "k_folds", c.select.k_folds);
        read(s, "max_features", c.select.max_features);
        read(s, "n_trees", c.select.n_trees);
        read(s, "max_depth", c.select.max_depth);
    }
    if (j.contains("train")) {
        const auto& s = j.at("train");
        detail::check_keys(s, "train",
                           {"k_folds", "variants", "pca_variance", "regression_families", "classification_families",
                            "adasyn", "adasyn_k", "grids"});
        auto& o = c.train;
        read(s, "k_folds", o.k_folds);
        read(s, "variants", o.variants);
        read(s, "pca_variance", o.pca_variance);
        read(s, "regression_families", o.regression_families);
        read(s, "classification_families", o.classification_families);
        read(s, "adasyn", o.adasyn);
        read(s, "adasyn_k", o.adasyn_k);
        if (s.contains("grids")) {
            for (const auto& [family, axes] : s.at("grids").items()) {
                if (!axes.is_object()) throw InvalidInput("config: train.grids." + family + " must be an object");
                auto& out = o.grids[family];
                for (const auto& [name, values] : axes.items()) {
                    if (!values.is_array() || values.empty())
                        throw InvalidInput("config: train.grids." + family + "." + name + " must be a non-empty list");
                    std::vector<HyperValue> vs;
                    for (const auto& v : values) vs.push_back(detail::hyper_value(v));
                    out.emplace_back(name, std::move(vs));
                }
            }
        }
    }
    c.validate();
    return c;
}

/// Relative paths inside the file resolve against the file's directory.
inline PipelineConfig load_config(const std::filesystem::path& p)
{
    const json j = io::parse_json(io::read_file(p), p.string());
    try {
        return config_from_json(j, p.parent_path());
    } catch (const json::exception& e) {
        throw InvalidInput("config " + p.string() + ": " + e.what());
    } catch (const InvalidInput& e) {
        throw InvalidInput(p.string() + ": " + e.what());
    }
}

} // namespace roadrough::pipeline
