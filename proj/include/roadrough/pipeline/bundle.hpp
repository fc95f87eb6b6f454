#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "roadrough/io/artifacts.hpp"
#include "roadrough/models/grid_search.hpp"
#include "roadrough/selection/sfs.hpp"

namespace roadrough::pipeline {

using nlohmann::json;

inline json to_json(const Hyperparams& hp)
{
    json j = json::object();
    for (const auto& [k, v] : hp.values()) {
        if (const auto* d = std::get_if<double>(&v)) j[k] = *d;
        else if (const auto* s = std::get_if<std::string>(&v)) j[k] = *s;
        else j[k] = std::get<std::vector<int>>(v);
    }
    return j;
}

inline Hyperparams hyperparams_from_json(const json& j)
{
    Hyperparams hp;
    for (const auto& [k, v] : j.items()) {
        if (v.is_number()) hp.set(k, v.get<double>());
        else if (v.is_string()) hp.set(k, v.get<std::string>());
        else if (v.is_array()) hp.set(k, v.get<std::vector<int>>());
        else throw IoError("hyperparameter '" + k + "' has an unsupported type");
    }
    return hp;
}

/// Everything needed to predict from raw feature rows: input column choice,
/// scaling, optional PCA and the fitted model.
struct ModelBundle {
    static constexpr int kSchemaVersion = 1;

    models::Task task = models::Task::Regression;
    std::string family;
    std::vector<std::string> feature_names; // input columns the bundle expects
    std::vector<std::size_t> selected;      // input columns fed to the model
    models::Preprocessor prep;
    Hyperparams hyperparams;
    std::shared_ptr<models::Model> model;

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const
    {
        detail::require(model != nullptr, "bundle: no model");
        detail::require(static_cast<std::size_t>(X.cols()) == feature_names.size(),
                        "bundle: expected " + std::to_string(feature_names.size()) + " input columns, got " +
                            std::to_string(X.cols()));
        return model->predict(prep.apply(selection::select_columns(X, selected)));
    }

    json to_json() const
    {
        json j;
        j["schema_version"] = kSchemaVersion;
        j["task"] = models::to_string(task);
        j["family"] = family;
        j["feature_names"] = feature_names;
        j["selected"] = selected;
        j["standardizer"] = {{"mean", models::detail::to_json(Eigen::VectorXd(prep.scaler.mean.transpose()))},
                             {"std", models::detail::to_json(Eigen::VectorXd(prep.scaler.std.transpose()))}};
        if (prep.pca)
            j["pca"] = {{"mean", models::detail::to_json(Eigen::VectorXd(prep.pca->mean.transpose()))},
                        {"components", models::detail::to_json(prep.pca->components)},
                        {"explained_ratio", models::detail::to_json(prep.pca->explained_ratio)},
                        {"all_ratios", models::detail::to_json(prep.pca->all_ratios)}};
        else
            j["pca"] = nullptr;
        j["hyperparams"] = pipeline::to_json(hyperparams);
        j["model"] = model->save();
        return j;
    }

    static ModelBundle from_json(const json& j)
    {
        const int version = j.at("schema_version").get<int>();
        if (version != kSchemaVersion)
            throw IoError("bundle: unsupported schema version " + std::to_string(version));
        ModelBundle b;
        b.task = models::task_from_string(j.at("task").get<std::string>());
        b.family = j.at("family").get<std::string>();
        b.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        b.selected = j.at("selected").get<std::vector<std::size_t>>();
        for (auto c : b.selected)
            if (c >= b.feature_names.size()) throw IoError("bundle: selected column out of range");
        b.prep.scaler.mean = models::detail::vector_from_json(j.at("standardizer").at("mean")).transpose();
        b.prep.scaler.std = models::detail::vector_from_json(j.at("standardizer").at("std")).transpose();
        if (b.prep.scaler.mean.size() != static_cast<Eigen::Index>(b.selected.size()) ||
            b.prep.scaler.std.size() != b.prep.scaler.mean.size())
            throw IoError("bundle: standardizer size does not match the selected columns");
        if (!j.at("pca").is_null()) {
            const auto& p = j.at("pca");
            selection::PcaBasis pca;
            pca.mean = models::detail::vector_from_json(p.at("mean")).transpose();
            pca.components = models::detail::matrix_from_json(p.at("components"));
            pca.explained_ratio = models::detail::vector_from_json(p.at("explained_ratio"));
            pca.all_ratios = models::detail::vector_from_json(p.at("all_ratios"));
            if (pca.components.rows() != pca.mean.size() || pca.mean.size() != b.prep.scaler.mean.size())
                throw IoError("bundle: PCA basis does not match the selected columns");
            b.prep.pca = std::move(pca);
        }
        b.hyperparams = hyperparams_from_json(j.at("hyperparams"));
        b.model = models::make_model(b.family, b.task, b.hyperparams);
        b.model->load(j.at("model"));
        return b;
    }
};

inline void save_bundle(const std::filesystem::path& p, const ModelBundle& b) { io::write_file(p, io::dump(b.to_json())); }

inline ModelBundle load_bundle(const std::filesystem::path& p) { return io::load_json_as(p, ModelBundle::from_json); }

} // namespace roadrough::pipeline
