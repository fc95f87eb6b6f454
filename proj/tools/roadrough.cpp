// roadrough: command-line driver for the roughness pipeline.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roadrough/pipeline/stages.hpp"

namespace {

using namespace roadrough;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config, "pipeline configuration (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "override the root seed");
    cmd->add_option("--out", c.out, "override the output directory");
    cmd->add_flag("-q,--quiet", c.quiet, "no progress messages");
}

pipeline::PipelineConfig load(const Common& c)
{
    pipeline::PipelineConfig cfg = c.config.empty() ? pipeline::PipelineConfig{} : pipeline::load_config(c.config);
    if (c.seed) cfg.seed = *c.seed;
    if (c.out) cfg.out_dir = *c.out;
    cfg.validate();
    return cfg;
}

pipeline::Progress progress(const Common& c)
{
    if (c.quiet) return {};
    return [](const std::string& msg) { std::fprintf(stderr, "[roadrough] %s\n", msg.c_str()); };
}

void print_metrics(const pipeline::RunReport& r)
{
    for (const auto& m : r.models) {
        std::printf("%-15s %-4s %-14s", models::to_string(m.task).c_str(), m.variant.c_str(), m.family.c_str());
        for (const auto& [k, v] : m.metrics) std::printf(" %s=%.4f", k.c_str(), v);
        std::printf("\n");
    }
    std::printf("leakage audit: %zu fits, %zu leaks\n", r.fits_logged, r.leaks);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Road roughness (IRI) estimation from vehicle acceleration and speed"};
    app.require_subcommand(1);
    Common common;

    std::vector<CLI::App*> stage_cmds;
    const std::vector<std::pair<std::string, std::string>> stages{
        {"simulate", "generate a route, its roughness profile, telemetry, reference IRI and road network"},
        {"match", "map-match the GPS fixes to the road network"},
        {"align", "place samples on the 10 m reference segments"},
        {"featurize", "build 100 m sliding windows and their feature matrix"},
        {"select", "ordered train/test split, constant removal and forward selection"},
        {"train", "grid search and final fit of every model family"},
        {"evaluate", "test-set metrics and predictions for every trained model"}};
    for (const auto& [name, help] : stages) {
        auto* cmd = app.add_subcommand(name, help);
        add_common(cmd, common);
        stage_cmds.push_back(cmd);
    }
    auto* run = app.add_subcommand("run", "run every stage enabled in the configuration, then export tables");
    add_common(run, common);
    auto* report = app.add_subcommand("report", "export report tables from a finished run");
    add_common(report, common);
    std::vector<std::string> formats{"csv", "md"};
    report->add_option("--format", formats, "output formats (csv, md)")->delimiter(',');
    run->add_option("--format", formats, "output formats (csv, md)")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = load(common);
        const auto prog = progress(common);
        const pipeline::Workspace ws{cfg.out_dir};
        for (std::size_t i = 0; i < stage_cmds.size(); ++i) {
            if (!stage_cmds[i]->parsed()) continue;
            if (auto r = pipeline::run_stage(stages[i].first, cfg, prog)) print_metrics(*r);
            return 0;
        }
        if (run->parsed()) {
            const auto r = pipeline::run_pipeline(cfg, prog);
            if (std::filesystem::exists(ws.report())) pipeline::export_report(r, ws.tables(), formats);
            print_metrics(r);
            return 0;
        }
        const auto r = pipeline::load_report(ws.report());
        for (const auto& p : pipeline::export_report(r, ws.tables(), formats)) std::printf("%s\n", p.string().c_str());
        return 0;
    } catch (const pipeline::StageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
