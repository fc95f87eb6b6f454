#pragma once

#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "roadrough/core/metrics.hpp"
#include "roadrough/io/artifacts.hpp"
#include "roadrough/io/csv.hpp"
#include "roadrough/pipeline/bundle.hpp"

namespace roadrough::pipeline {

struct GridRow {
    Hyperparams hyperparams;
    std::vector<double> cv; // one score per round, NaN when the point failed
    double mean = std::numeric_limits<double>::quiet_NaN();
    std::string error;
};

struct ModelEntry {
    models::Task task = models::Task::Regression;
    std::string variant; // "sfs" or "pca"
    std::string family;
    std::size_t n_inputs = 0; // columns after selection / PCA
    Hyperparams best;
    std::vector<GridRow> grid;
    std::string bundle; // path relative to the run directory

    // Filled by evaluation.
    std::map<std::string, double> metrics;
    std::optional<ConfusionMatrix> confusion;
    std::vector<double> actual, predicted; // test rows in route order
    std::string predictions;               // relative path of the persisted pairs

    std::string key() const { return models::to_string(task) + "_" + variant + "_" + family; }
};

struct SfsSummary {
    std::vector<std::string> dropped_constant;
    std::vector<std::string> order; // features in selection order
    std::vector<double> cv_rmse;    // curve over subset size
    std::size_t chosen = 0;
    std::vector<std::string> selected;
};

struct RunReport {
    std::uint64_t seed = 0;
    std::map<std::string, std::map<std::string, double>> counters; // stage -> name -> value
    SfsSummary sfs;
    std::vector<ModelEntry> models;
    std::size_t fits_logged = 0;
    std::size_t leaks = 0;

    const ModelEntry* find(models::Task task, const std::string& variant, const std::string& family) const
    {
        for (const auto& m : models)
            if (m.task == task && m.variant == variant && m.family == family) return &m;
        return nullptr;
    }
};

namespace detail {

inline json nan_to_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
inline double null_to_nan(const json& j)
{
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline json confusion_to_json(const ConfusionMatrix& c)
{
    json rows = json::array();
    for (const auto& r : c) rows.push_back(std::vector<std::size_t>(r.begin(), r.end()));
    return rows;
}

inline ConfusionMatrix confusion_from_json(const json& j)
{
    ConfusionMatrix c{};
    roadrough::detail::require(j.size() == kNumIriLevels, "report: confusion matrix must be 3x3");
    for (std::size_t r = 0; r < kNumIriLevels; ++r) {
        roadrough::detail::require(j.at(r).size() == kNumIriLevels, "report: confusion matrix must be 3x3");
        for (std::size_t k = 0; k < kNumIriLevels; ++k) c[r][k] = j.at(r).at(k).get<std::size_t>();
    }
    return c;
}

} // namespace detail

inline json to_json(const GridRow& g)
{
    json cv = json::array();
    for (double v : g.cv) cv.push_back(detail::nan_to_null(v));
    json j = {{"hyperparams", to_json(g.hyperparams)}, {"cv", cv}, {"mean", detail::nan_to_null(g.mean)}};
    if (!g.error.empty()) j["error"] = g.error;
    return j;
}

inline GridRow grid_row_from_json(const json& j)
{
    GridRow g;
    g.hyperparams = hyperparams_from_json(j.at("hyperparams"));
    for (const auto& v : j.at("cv")) g.cv.push_back(detail::null_to_nan(v));
    g.mean = detail::null_to_nan(j.at("mean"));
    g.error = j.value("error", "");
    return g;
}

inline json to_json(const ModelEntry& m)
{
    json grid = json::array();
    for (const auto& g : m.grid) grid.push_back(to_json(g));
    json j = {{"task", models::to_string(m.task)},
              {"variant", m.variant},
              {"family", m.family},
              {"n_inputs", m.n_inputs},
              {"best", to_json(m.best)},
              {"grid", grid},
              {"bundle", m.bundle},
              {"metrics", m.metrics},
              {"predictions", m.predictions},
              {"actual", m.actual},
              {"predicted", m.predicted}};
    j["confusion"] = m.confusion ? detail::confusion_to_json(*m.confusion) : json(nullptr);
    return j;
}

inline ModelEntry model_entry_from_json(const json& j)
{
    ModelEntry m;
    m.task = models::task_from_string(j.at("task").get<std::string>());
    m.variant = j.at("variant").get<std::string>();
    m.family = j.at("family").get<std::string>();
    m.n_inputs = j.at("n_inputs").get<std::size_t>();
    m.best = hyperparams_from_json(j.at("best"));
    for (const auto& g : j.at("grid")) m.grid.push_back(grid_row_from_json(g));
    m.bundle = j.at("bundle").get<std::string>();
    m.metrics = j.at("metrics").get<std::map<std::string, double>>();
    m.predictions = j.at("predictions").get<std::string>();
    m.actual = j.at("actual").get<std::vector<double>>();
    m.predicted = j.at("predicted").get<std::vector<double>>();
    if (!j.at("confusion").is_null()) m.confusion = detail::confusion_from_json(j.at("confusion"));
    return m;
}

inline json to_json(const SfsSummary& s)
{
    return {{"dropped_constant", s.dropped_constant},
            {"order", s.order},
            {"cv_rmse", s.cv_rmse},
            {"chosen", s.chosen},
            {"selected", s.selected}};
}

inline SfsSummary sfs_summary_from_json(const json& j)
{
    SfsSummary s;
    s.dropped_constant = j.at("dropped_constant").get<std::vector<std::string>>();
    s.order = j.at("order").get<std::vector<std::string>>();
    s.cv_rmse = j.at("cv_rmse").get<std::vector<double>>();
    s.chosen = j.at("chosen").get<std::size_t>();
    s.selected = j.at("selected").get<std::vector<std::string>>();
    return s;
}

inline json to_json(const RunReport& r)
{
    json models = json::array();
    for (const auto& m : r.models) models.push_back(to_json(m));
    return {{"seed", r.seed},
            {"counters", r.counters},
            {"sfs", to_json(r.sfs)},
            {"models", models},
            {"leakage", {{"fits_logged", r.fits_logged}, {"leaks", r.leaks}}}};
}

inline RunReport run_report_from_json(const json& j)
{
    RunReport r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.counters = j.at("counters").get<std::map<std::string, std::map<std::string, double>>>();
    r.sfs = sfs_summary_from_json(j.at("sfs"));
    for (const auto& m : j.at("models")) r.models.push_back(model_entry_from_json(m));
    r.fits_logged = j.at("leakage").at("fits_logged").get<std::size_t>();
    r.leaks = j.at("leakage").at("leaks").get<std::size_t>();
    return r;
}

inline void save_report(const std::filesystem::path& p, const RunReport& r) { io::write_file(p, io::dump(to_json(r))); }
inline RunReport load_report(const std::filesystem::path& p) { return io::load_json_as(p, run_report_from_json); }

// ---- metrics from prediction pairs

inline std::map<std::string, double> regression_metric_map(const std::vector<double>& y, const std::vector<double>& p)
{
    const auto m = regression_metrics(y, p);
    return {{"r2", m.r2}, {"mae", m.mae}, {"rmse", m.rmse}, {"mre", m.mre}};
}

inline std::vector<IriLevel> as_levels(const std::vector<double>& v)
{
    std::vector<IriLevel> out;
    for (double x : v) {
        roadrough::detail::require(x >= 0 && x < static_cast<double>(kNumIriLevels) && x == std::floor(x),
                                   "class label out of range");
        out.push_back(level_at(static_cast<int>(x)));
    }
    return out;
}

inline std::map<std::string, double> classification_metric_map(const std::vector<double>& y,
                                                               const std::vector<double>& p, ConfusionMatrix* cm)
{
    const auto a = as_levels(y), b = as_levels(p);
    const auto c = confusion_matrix(a, b);
    const auto m = classification_metrics(c);
    if (cm) *cm = c;
    return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"adjacent_share", adjacent_error_share(c)}};
}

/// Test metrics recomputed from the stored prediction pairs.
inline std::map<std::string, double> recompute_metrics(const ModelEntry& m)
{
    return m.task == models::Task::Regression ? regression_metric_map(m.actual, m.predicted)
                                              : classification_metric_map(m.actual, m.predicted, nullptr);
}

// ---- prediction pairs file: actual,predicted per test row

inline std::string predictions_to_csv(const ModelEntry& m)
{
    std::string out = "row,actual,predicted\n";
    for (std::size_t i = 0; i < m.actual.size(); ++i)
        out += std::to_string(i) + ',' + io::format_number(m.actual[i]) + ',' + io::format_number(m.predicted[i]) + '\n';
    return out;
}

inline std::pair<std::vector<double>, std::vector<double>> predictions_from_csv(std::string content,
                                                                                const std::string& name)
{
    const io::CsvTable tab(std::move(content), name);
    tab.expect_header("row,actual,predicted");
    std::vector<double> a, p;
    for (std::size_t r = 0; r < tab.rows(); ++r) {
        const auto f = tab.row(r, 3);
        a.push_back(io::parse_number(f[1], tab.where(r)));
        p.push_back(io::parse_number(f[2], tab.where(r)));
    }
    return {a, p};
}

// ---- export

/// Writes the report tables under `dir`. Formats: "csv" (one file per table)
/// and "md" (a single summary.md).
inline std::vector<std::filesystem::path> export_report(const RunReport& r, const std::filesystem::path& dir,
                                                        const std::vector<std::string>& formats = {"csv", "md"})
{
    for (const auto& f : formats)
        roadrough::detail::require(f == "csv" || f == "md", "export_report: unknown format '" + f + "'");
    auto wants = [&](const char* f) { return std::find(formats.begin(), formats.end(), f) != formats.end(); };
    std::vector<std::string> variants;
    for (const auto& m : r.models)
        if (std::find(variants.begin(), variants.end(), m.variant) == variants.end()) variants.push_back(m.variant);

    struct Table {
        std::string name;
        std::vector<std::string> header;
        std::vector<std::vector<std::string>> rows;
    };
    std::vector<Table> tables;

    // Model rows, variants side by side.
    auto metrics_table = [&](models::Task task, std::vector<std::string> metric_names) {
        Table t{"metrics_" + models::to_string(task), {"model"}, {}};
        for (const auto& v : variants)
            for (const auto& n : metric_names) t.header.push_back(v + "_" + n);
        std::vector<std::string> families;
        for (const auto& m : r.models)
            if (m.task == task && std::find(families.begin(), families.end(), m.family) == families.end())
                families.push_back(m.family);
        for (const auto& f : families) {
            std::vector<std::string> row{f};
            for (const auto& v : variants) {
                const auto* m = r.find(task, v, f);
                for (const auto& n : metric_names)
                    row.push_back(m && m->metrics.count(n) ? io::format_number(m->metrics.at(n)) : "");
            }
            t.rows.push_back(std::move(row));
        }
        tables.push_back(std::move(t));
    };
    metrics_table(models::Task::Regression, {"r2", "mae", "rmse", "mre"});
    metrics_table(models::Task::Classification, {"precision", "recall", "f1"});

    for (const auto& m : r.models) {
        if (m.confusion) {
            Table t{"confusion_" + m.variant + "_" + m.family, {"true\\predicted"}, {}};
            for (auto l : kAllIriLevels) t.header.emplace_back(to_string(l));
            for (auto l : kAllIriLevels) {
                std::vector<std::string> row{std::string(to_string(l))};
                for (std::size_t k = 0; k < kNumIriLevels; ++k)
                    row.push_back(std::to_string((*m.confusion)[static_cast<std::size_t>(index_of(l))][k]));
                t.rows.push_back(std::move(row));
            }
            tables.push_back(std::move(t));
        } else if (m.task == models::Task::Regression) {
            Table t{"predicted_vs_actual_" + m.variant + "_" + m.family, {"actual_iri", "predicted_iri"}, {}};
            for (std::size_t i = 0; i < m.actual.size(); ++i)
                t.rows.push_back({io::format_number(m.actual[i]), io::format_number(m.predicted[i])});
            tables.push_back(std::move(t));
        }
    }

    Table curve{"sfs_curve", {"n_features", "added_feature", "cv_rmse"}, {}};
    for (std::size_t i = 0; i < r.sfs.order.size(); ++i)
        curve.rows.push_back({std::to_string(i + 1), r.sfs.order[i], io::format_number(r.sfs.cv_rmse[i])});
    tables.push_back(std::move(curve));

    std::vector<std::filesystem::path> written;
    auto join = [](const std::vector<std::string>& cells, const std::string& sep) {
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? sep : "") + cells[i];
        return s;
    };
    if (wants("csv")) {
        for (const auto& t : tables) {
            std::string s = join(t.header, ",") + '\n';
            for (const auto& row : t.rows) s += join(row, ",") + '\n';
            written.push_back(dir / (t.name + ".csv"));
            io::write_file(written.back(), s);
        }
    }
    if (wants("md")) {
        // Summary only: the long prediction tables stay in CSV.
        std::string s = "# Run summary (seed " + std::to_string(r.seed) + ")\n";
        for (const auto& t : tables) {
            if (t.name.rfind("predicted_vs_actual_", 0) == 0) continue;
            s += "\n## " + t.name + "\n\n| " + join(t.header, " | ") + " |\n|";
            for (std::size_t i = 0; i < t.header.size(); ++i) s += "---|";
            s += '\n';
            for (const auto& row : t.rows) s += "| " + join(row, " | ") + " |\n";
        }
        s += "\nLeakage audit: " + std::to_string(r.fits_logged) + " fits logged, " + std::to_string(r.leaks) +
             " saw held-out rows.\n";
        written.push_back(dir / "summary.md");
        io::write_file(written.back(), s);
    }
    return written;
}

} // namespace roadrough::pipeline
