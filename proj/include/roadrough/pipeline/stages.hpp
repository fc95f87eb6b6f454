#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "roadrough/core/split.hpp"
#include "roadrough/features/feature_matrix.hpp"
#include "roadrough/features/resample.hpp"
#include "roadrough/geoalign/align.hpp"
#include "roadrough/geoalign/interpolate.hpp"
#include "roadrough/geoalign/map_match.hpp"
#include "roadrough/geoalign/network.hpp"
#include "roadrough/geoalign/windows.hpp"
#include "roadrough/io/artifacts.hpp"
#include "roadrough/io/formats.hpp"
#include "roadrough/pipeline/config.hpp"
#include "roadrough/pipeline/report.hpp"
#include "roadrough/simkit/iri.hpp"
#include "roadrough/simkit/route.hpp"
#include "roadrough/simkit/telemetry.hpp"

namespace roadrough::pipeline {

namespace fs = std::filesystem;

/// A stage failed; the message starts with the stage name.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& msg)
        : Error("stage '" + stage + "' failed: " + msg), stage_(std::move(stage))
    {
    }
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

using Progress = std::function<void(const std::string&)>;

/// Artifact locations inside the run directory.
struct Workspace {
    fs::path dir;

    fs::path telemetry() const { return dir / "telemetry.csv"; }
    fs::path reference() const { return dir / "reference.csv"; }
    fs::path network() const { return dir / "network.txt"; }
    fs::path matched() const { return dir / "matched.json"; }
    fs::path pieces() const { return dir / "pieces.json"; }
    fs::path dataset() const { return dir / "dataset.csv"; }
    fs::path selection() const { return dir / "selection.json"; }
    fs::path training() const { return dir / "training.json"; }
    fs::path report() const { return dir / "report.json"; }
    fs::path summary(std::string_view stage) const { return dir / ("summary_" + std::string(stage) + ".json"); }
    fs::path tables() const { return dir / "tables"; }
};

namespace detail {

inline fs::path input_or(const fs::path& configured, const fs::path& fallback)
{
    const fs::path p = configured.empty() ? fallback : configured;
    if (!fs::exists(p)) throw IoError("missing input file '" + p.string() + "'");
    return p;
}

inline void save_counters(const Workspace& ws, std::string_view stage, const std::map<std::string, double>& c)
{
    io::write_file(ws.summary(stage), io::dump(json(c)));
}

inline json events_to_json(const models::FitLog& log)
{
    auto ranges = [](const std::vector<models::IndexRange>& rs) {
        json a = json::array();
        for (const auto& r : rs) a.push_back({r.begin, r.end});
        return a;
    };
    json out = json::array();
    for (const auto& e : log.events())
        out.push_back({{"what", e.what}, {"observed", ranges(e.observed)}, {"held_out", ranges(e.held_out)}});
    return out;
}

inline void events_from_json(const json& j, models::FitLog& log)
{
    auto ranges = [](const json& a) {
        std::vector<models::IndexRange> rs;
        for (const auto& r : a) rs.push_back({r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>()});
        return rs;
    };
    for (const auto& e : j)
        log.record({e.at("what").get<std::string>(), ranges(e.at("observed")), ranges(e.at("held_out"))});
}

inline Eigen::VectorXd level_indices(const std::vector<IriLevel>& levels)
{
    Eigen::VectorXd y(static_cast<Eigen::Index>(levels.size()));
    for (std::size_t i = 0; i < levels.size(); ++i) y(static_cast<Eigen::Index>(i)) = index_of(levels[i]);
    return y;
}

} // namespace detail

/// Selection stage output: the split and the chosen input columns.
struct Selection {
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::vector<std::size_t> kept;     // input columns left after constant removal
    std::vector<std::size_t> order;    // input columns in SFS order
    std::vector<double> cv_rmse;
    std::size_t chosen = 0;
    std::vector<std::size_t> selected; // first `chosen` of order
    models::FitLog log;

    json to_json(const std::vector<std::string>& names) const
    {
        std::vector<std::string> sel_names;
        for (auto c : selected) sel_names.push_back(names.at(c));
        return {{"train_rows", train_rows}, {"test_rows", test_rows}, {"kept", kept},
                {"order", order},           {"cv_rmse", cv_rmse},     {"chosen", chosen},
                {"selected", selected},     {"selected_names", sel_names}, {"fits", detail::events_to_json(log)}};
    }

    static Selection from_json(const json& j)
    {
        Selection s;
        s.train_rows = j.at("train_rows").get<std::size_t>();
        s.test_rows = j.at("test_rows").get<std::size_t>();
        s.kept = j.at("kept").get<std::vector<std::size_t>>();
        s.order = j.at("order").get<std::vector<std::size_t>>();
        s.cv_rmse = j.at("cv_rmse").get<std::vector<double>>();
        s.chosen = j.at("chosen").get<std::size_t>();
        s.selected = j.at("selected").get<std::vector<std::size_t>>();
        detail::events_from_json(j.at("fits"), s.log);
        return s;
    }
};

// ---- stages

inline void run_simulate(const PipelineConfig& cfg, const Workspace& ws)
{
    const auto& s = cfg.simulate;
    const auto route = simkit::make_route(s.origin, s.route_length_m, cfg.seed_for("route"));
    const auto field = simkit::random_roughness_field(s.route_length_m, s.g0_min, s.g0_max, s.section_min_m,
                                                      s.section_max_m, cfg.seed_for("roughness"));
    const auto profile = simkit::generate_route_profile(s.route_length_m, s.dx_m, field, cfg.seed_for("profile"));
    simkit::SimConfig sim;
    sim.speed_profile = simkit::random_speed_profile(s.route_length_m, s.speed_knot_spacing_m, s.speed_min_ms,
                                                     s.speed_max_ms, cfg.seed_for("speed"));
    sim.acc_rate = s.acc_rate_hz;
    sim.gps_rate = s.gps_rate_hz;
    sim.gps_noise_sigma = s.gps_noise_m * std::sqrt(2.0); // radial RMS from the per-axis std
    sim.acc_noise_sigma = s.acc_noise_ms2;
    sim.max_substep = s.max_substep_s;
    sim.seed = cfg.seed_for("sensors");
    const auto trace = simkit::synthesize_telemetry(profile, route, sim);
    const auto reference = simkit::build_reference_segments(profile, route, s.reference_segment_m);
    const auto net = geoalign::network_from_route(route, s.spur_every, s.spur_length_m, cfg.seed_for("network"));

    io::save_telemetry(ws.telemetry(), trace);
    io::save_reference(ws.reference(), reference);
    io::save_network(ws.network(), net);
    std::size_t fixes = 0;
    for (const auto& x : trace) fixes += x.gps.has_value();
    detail::save_counters(ws, "simulate",
                          {{"samples", static_cast<double>(trace.size())},
                           {"gps_fixes", static_cast<double>(fixes)},
                           {"reference_segments", static_cast<double>(reference.size())},
                           {"network_nodes", static_cast<double>(net.node_count())},
                           {"network_edges", static_cast<double>(net.edge_count())}});
}

inline void run_match(const PipelineConfig& cfg, const Workspace& ws)
{
    const auto trace = io::load_telemetry(detail::input_or(cfg.telemetry, ws.telemetry()));
    const auto net = io::load_network(detail::input_or(cfg.network, ws.network()));
    const auto matched = geoalign::map_match(trace, net, cfg.match.options);
    io::save_matched(ws.matched(), matched);
    double snap = 0.0;
    for (const auto& f : matched.fixes) snap += f.snap.distance;
    detail::save_counters(ws, "match",
                          {{"fixes", static_cast<double>(matched.fixes.size())},
                           {"edges_traversed", static_cast<double>(matched.edge_sequence.size())},
                           {"mean_snap_distance_m", matched.fixes.empty() ? 0.0 : snap / static_cast<double>(matched.fixes.size())}});
}

inline void run_align(const PipelineConfig& cfg, const Workspace& ws)
{
    const auto trace = io::load_telemetry(detail::input_or(cfg.telemetry, ws.telemetry()));
    const auto reference = io::load_reference(detail::input_or(cfg.reference, ws.reference()));
    const auto matched = io::load_matched(detail::input_or({}, ws.matched()));
    const auto pos = geoalign::interpolate_positions(trace, matched);
    const auto res = geoalign::align_segments(reference, pos, trace, cfg.align.options);
    io::save_pieces(ws.pieces(), res.pieces);
    detail::save_counters(ws, "align",
                          {{"unpositioned_samples", static_cast<double>(pos.dropped)},
                           {"segments", static_cast<double>(res.report.segments)},
                           {"pieces_kept", static_cast<double>(res.report.kept)},
                           {"dropped_no_nearby_sample", static_cast<double>(res.report.dropped_no_nearby)},
                           {"dropped_too_few_samples", static_cast<double>(res.report.dropped_too_few)}});
}

inline void run_featurize(const PipelineConfig& cfg, const Workspace& ws)
{
    const auto pieces = io::load_pieces(detail::input_or({}, ws.pieces()));
    auto windows = geoalign::sliding_windows(pieces, cfg.align.window_pieces);
    detail::require(!windows.empty(), "no complete window of " + std::to_string(cfg.align.window_pieces) +
                                          " consecutive pieces");
    for (auto& w : windows) w = features::resample_segment(w, cfg.featurize.resample_length);
    const auto ds = features::build_feature_matrix(windows);
    io::save_dataset(ws.dataset(), ds);
    const double possible = pieces.size() >= cfg.align.window_pieces
                                ? static_cast<double>(pieces.size() - cfg.align.window_pieces + 1)
                                : 0.0;
    std::array<double, kNumIriLevels> count{};
    for (auto l : ds.level) count[static_cast<std::size_t>(index_of(l))] += 1;
    detail::save_counters(ws, "featurize",
                          {{"windows", static_cast<double>(windows.size())},
                           {"dropped_windows_across_gaps", possible - static_cast<double>(windows.size())},
                           {"features", static_cast<double>(ds.cols())},
                           {"windows_low", count[0]},
                           {"windows_medium", count[1]},
                           {"windows_high", count[2]}});
}

inline void run_select(const PipelineConfig& cfg, const Workspace& ws)
{
    const auto ds = io::load_dataset(detail::input_or({}, ws.dataset()));
    const auto [train, test] = ordered_split(ds, cfg.select.train_fraction);
    Selection sel;
    sel.train_rows = train.rows();
    sel.test_rows = test.rows();
    const std::vector<models::IndexRange> seen{{0, sel.train_rows}}, hidden{{sel.train_rows, ds.rows()}};

    sel.kept = selection::constant_free_columns(train.X);
    sel.log.record({"drop_constant", seen, hidden});
    selection::SfsOptions opt;
    opt.k_folds = cfg.select.k_folds;
    opt.max_features = cfg.select.max_features;
    opt.n_trees = cfg.select.n_trees;
    opt.max_depth = cfg.select.max_depth;
    opt.seed = cfg.seed_for("sfs");
    opt.log = &sel.log;
    opt.held_out = hidden;
    const auto res = selection::sfs_forward(selection::select_columns(train.X, sel.kept), train.y, opt);
    for (auto c : res.order) sel.order.push_back(sel.kept[c]);
    sel.cv_rmse = res.cv_rmse;
    sel.chosen = res.chosen;
    sel.selected.assign(sel.order.begin(), sel.order.begin() + static_cast<std::ptrdiff_t>(sel.chosen));
    io::write_file(ws.selection(), io::dump(sel.to_json(ds.feature_names)));
}

/// Grid search plus final refit of every configured family, per task and
/// feature variant. Bundles go to models/, the CV tables to training.json.
inline void run_train(const PipelineConfig& cfg, const Workspace& ws, const Progress& progress = {})
{
    const auto ds = io::load_dataset(detail::input_or({}, ws.dataset()));
    const auto sel = io::load_json_as(detail::input_or({}, ws.selection()), Selection::from_json);
    detail::require(sel.train_rows + sel.test_rows == ds.rows(), "selection does not match the dataset row count");
    const Dataset train = ds.slice(0, sel.train_rows);
    const Eigen::MatrixXd X = selection::select_columns(train.X, sel.selected);
    const std::vector<models::IndexRange> seen{{0, sel.train_rows}}, hidden{{sel.train_rows, ds.rows()}};

    models::FitLog log;
    json entries = json::array();
    for (auto task : {models::Task::Regression, models::Task::Classification}) {
        const bool cls = task == models::Task::Classification;
        const Eigen::VectorXd y = cls ? detail::level_indices(train.level) : train.y;
        const auto& families = cls ? cfg.train.classification_families : cfg.train.regression_families;
        for (const auto& variant : cfg.train.variants) {
            models::PrepOptions prep;
            prep.pca = variant == "pca";
            prep.pca_target = cfg.train.pca_variance;
            prep.adasyn = cls && cfg.train.adasyn;
            prep.adasyn_k = cfg.train.adasyn_k;
            prep.seed = cfg.seed_for("adasyn");
            for (const auto& family : families) {
                const auto t0 = std::chrono::steady_clock::now();
                models::GridOptions go;
                go.k_folds = cfg.train.k_folds;
                go.prep = prep;
                go.n_classes = cls ? static_cast<int>(kNumIriLevels) : 0;
                go.held_out = hidden;
                go.log = &log;
                const auto gr = models::grid_search(family, task, cfg.grid_for(family, task), X, y, go);

                const auto pt = models::prepare_train(X, y, task, prep, &log, family + " final", seen, hidden);
                ModelBundle b;
                b.task = task;
                b.family = family;
                b.feature_names = ds.feature_names;
                b.selected = sel.selected;
                b.prep = pt.prep;
                b.hyperparams = gr.best_params();
                b.model = models::make_model(family, task, b.hyperparams);
                b.model->fit(pt.X, pt.y);
                log.record({family + " final fit", seen, hidden});

                ModelEntry e;
                e.task = task;
                e.variant = variant;
                e.family = family;
                e.n_inputs = pt.prep.pca ? pt.prep.pca->n_components() : sel.selected.size();
                e.best = b.hyperparams;
                for (std::size_t p = 0; p < gr.points.size(); ++p) {
                    GridRow row;
                    row.hyperparams = gr.points[p];
                    const auto c = gr.cv.row(static_cast<Eigen::Index>(p));
                    row.cv.assign(c.data(), c.data() + c.size());
                    row.mean = gr.mean[p];
                    row.error = gr.errors[p];
                    e.grid.push_back(std::move(row));
                }
                e.bundle = "models/" + e.key() + ".json";
                save_bundle(ws.dir / e.bundle, b);
                entries.push_back(to_json(e));
                if (progress) {
                    const double sec =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                    char buf[64];
                    std::snprintf(buf, sizeof buf, " (%.1f s)", sec);
                    progress("trained " + e.key() + " " + e.best.describe() + buf);
                }
            }
        }
    }
    io::write_file(ws.training(), io::dump({{"models", entries}, {"fits", detail::events_to_json(log)}}));
}

/// Test-set predictions and metrics for every trained bundle, assembled with
/// the stage counters into report.json.
inline RunReport run_evaluate(const PipelineConfig& cfg, const Workspace& ws)
{
    const auto ds = io::load_dataset(detail::input_or({}, ws.dataset()));
    const auto sel = io::load_json_as(detail::input_or({}, ws.selection()), Selection::from_json);
    const json training = io::parse_json(io::read_file(detail::input_or({}, ws.training())), ws.training().string());
    detail::require(sel.train_rows + sel.test_rows == ds.rows(), "selection does not match the dataset row count");
    const Dataset test = ds.slice(sel.train_rows, ds.rows());

    RunReport r;
    r.seed = cfg.seed;
    for (auto stage : kStages)
        if (fs::exists(ws.summary(stage)))
            r.counters[std::string(stage)] = io::load_json_as(ws.summary(stage), [](const json& j) {
                return j.get<std::map<std::string, double>>();
            });
    r.counters["split"] = {{"train_rows", static_cast<double>(sel.train_rows)},
                           {"test_rows", static_cast<double>(sel.test_rows)}};

    for (auto c = std::size_t{0}; c < ds.cols(); ++c)
        if (std::find(sel.kept.begin(), sel.kept.end(), c) == sel.kept.end())
            r.sfs.dropped_constant.push_back(ds.feature_names[c]);
    for (auto c : sel.order) r.sfs.order.push_back(ds.feature_names[c]);
    r.sfs.cv_rmse = sel.cv_rmse;
    r.sfs.chosen = sel.chosen;
    for (auto c : sel.selected) r.sfs.selected.push_back(ds.feature_names[c]);

    const Eigen::VectorXd levels = detail::level_indices(test.level);
    for (const auto& ej : training.at("models")) {
        auto e = model_entry_from_json(ej);
        const auto b = load_bundle(ws.dir / e.bundle);
        detail::require(b.feature_names == ds.feature_names, e.bundle + ": feature names differ from the dataset");
        const Eigen::VectorXd p = b.predict(test.X);
        const Eigen::VectorXd& y = e.task == models::Task::Regression ? test.y : levels;
        e.actual.assign(y.data(), y.data() + y.size());
        e.predicted.assign(p.data(), p.data() + p.size());
        if (e.task == models::Task::Regression) {
            e.metrics = regression_metric_map(e.actual, e.predicted);
        } else {
            ConfusionMatrix cm{};
            e.metrics = classification_metric_map(e.actual, e.predicted, &cm);
            e.confusion = cm;
        }
        e.predictions = "predictions/" + e.key() + ".csv";
        io::write_file(ws.dir / e.predictions, predictions_to_csv(e));
        r.models.push_back(std::move(e));
    }

    models::FitLog all = sel.log;
    models::FitLog train_log;
    detail::events_from_json(training.at("fits"), train_log);
    for (const auto& ev : train_log.events()) all.record(ev);
    r.fits_logged = all.events().size();
    r.leaks = all.leaks();
    save_report(ws.report(), r);
    return r;
}

/// Runs one stage regardless of its toggle. Returns the report when the
/// stage is evaluate.
inline std::optional<RunReport> run_stage(std::string_view stage, const PipelineConfig& cfg,
                                          const Progress& progress = {})
{
    const Workspace ws{cfg.out_dir};
    const auto t0 = std::chrono::steady_clock::now();
    std::optional<RunReport> report;
    try {
        if (std::find(kStages.begin(), kStages.end(), stage) == kStages.end())
            throw InvalidInput("unknown stage");
        std::error_code ec;
        fs::create_directories(ws.dir, ec);
        if (ec) throw IoError("cannot create output directory '" + ws.dir.string() + "': " + ec.message());
        if (stage == "simulate") run_simulate(cfg, ws);
        else if (stage == "match") run_match(cfg, ws);
        else if (stage == "align") run_align(cfg, ws);
        else if (stage == "featurize") run_featurize(cfg, ws);
        else if (stage == "select") run_select(cfg, ws);
        else if (stage == "train") run_train(cfg, ws, progress);
        else report = run_evaluate(cfg, ws);
    } catch (const std::exception& e) {
        throw StageError(std::string(stage), e.what());
    }
    if (progress) {
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.1f s", sec);
        progress(std::string(stage) + " done in " + buf);
    }
    return report;
}

/// Runs the enabled stages in order. A failing stage is reported by name;
/// artifacts of the stages before it stay on disk.
inline RunReport run_pipeline(const PipelineConfig& cfg, const Progress& progress = {})
{
    cfg.validate();
    std::optional<RunReport> report;
    for (auto stage : kStages)
        if (cfg.enabled(stage))
            if (auto r = run_stage(stage, cfg, progress)) report = std::move(r);
    if (report) return *report;
    const Workspace ws{cfg.out_dir};
    if (fs::exists(ws.report())) return load_report(ws.report());
    RunReport empty;
    empty.seed = cfg.seed;
    return empty;
}

} // namespace roadrough::pipeline
