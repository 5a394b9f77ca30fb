#include "relink/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "relink/util.hpp"

namespace relink {

using json = nlohmann::json;

const char* kToolVersion = "0.1.0";

std::string_view preset_str(ExperimentPreset p) {
    switch (p) {
        case ExperimentPreset::exp1: return "exp1";
        case ExperimentPreset::exp2: return "exp2";
        case ExperimentPreset::exp3: return "exp3";
        case ExperimentPreset::exp4: return "exp4";
    }
    return "?";
}

std::optional<ExperimentPreset> preset_from(std::string_view s) {
    if (s == "exp1") return ExperimentPreset::exp1;
    if (s == "exp2") return ExperimentPreset::exp2;
    if (s == "exp3") return ExperimentPreset::exp3;
    if (s == "exp4") return ExperimentPreset::exp4;
    return std::nullopt;
}

std::vector<std::string> preset_features(ExperimentPreset preset, const FeatureLayout& layout,
                                         const WeightModel* exp1_model) {
    switch (preset) {
        case ExperimentPreset::exp1:
            return layout.names;
        case ExperimentPreset::exp2: {
            if (!exp1_model)
                throw DataError("preset exp2 needs the exp1 model to rank features");
            // best name combination, then the three heaviest attributes
            std::string best_name;
            double best_name_w = -std::numeric_limits<double>::infinity();
            std::vector<std::pair<double, std::string>> attrs;
            for (std::size_t j = 0; j < exp1_model->feature_names.size(); ++j) {
                const std::string& f = exp1_model->feature_names[j];
                if (FeatureLayout::is_name_feature(f)) {
                    if (exp1_model->weights[j] > best_name_w) {
                        best_name_w = exp1_model->weights[j];
                        best_name = f;
                    }
                } else {
                    attrs.push_back({exp1_model->weights[j], f});
                }
            }
            std::stable_sort(attrs.begin(), attrs.end(),
                             [](const auto& a, const auto& b) { return a.first > b.first; });
            std::vector<std::string> out;
            if (!best_name.empty()) out.push_back(best_name);
            for (std::size_t i = 0; i < attrs.size() && out.size() < 4; ++i)
                out.push_back(attrs[i].second);
            return out;
        }
        case ExperimentPreset::exp3: {
            std::vector<std::string> out;
            for (const std::string& f : layout.names)
                if (!FeatureLayout::is_name_feature(f)) out.push_back(f);
            return out;
        }
        case ExperimentPreset::exp4: {
            std::vector<std::string> out;
            for (const std::string& f : layout.names)
                if (f == "freetext" || f == "activity" || f == "interest" || f == "sentiment")
                    out.push_back(f);
            return out;
        }
    }
    throw DataError("unknown experiment preset");
}

std::vector<std::string> sample_post_texts(const Corpus& a, const Corpus& b, std::size_t cap,
                                           std::uint64_t seed) {
    std::vector<std::string> texts;
    for (const Corpus* c : {&a, &b})
        for (const Profile& p : c->profiles)
            for (const Post& post : p.posts) texts.push_back(post.text);
    if (texts.size() > cap) {
        DetRng rng(fnv1a64_mix(seed, fnv1a64("lda-sample")));
        rng.shuffle(texts);
        texts.resize(cap);
    }
    return texts;
}

LdaModel fit_pipeline_lda(const Corpus& aux_train, const Corpus& target_train,
                          const LdaParams& params, std::uint64_t seed) {
    std::vector<std::string> texts =
        sample_post_texts(aux_train, target_train, params.sample_cap, seed);
    return fit_lda(texts, params.theta, params.alpha, params.beta, params.iterations, seed);
}

TrainOutput train_pipeline(const Corpus& aux_train, const Corpus& target_train,
                           const std::vector<PairLabel>& labels, const SimilarityEngine& engine,
                           ExperimentPreset preset, TrainerKind trainer, const SvmParams& svm) {
    TrainOutput out;
    out.layout = FeatureLayout::build(aux_train, target_train);

    std::vector<std::pair<SimilarityVector, bool>> pairs;
    pairs.reserve(labels.size());
    std::unordered_map<std::string, ProfileFeatures> aux_cache, target_cache;
    for (const PairLabel& l : labels) {
        const Profile* pa = aux_train.find(l.aux_id);
        const Profile* pt = target_train.find(l.target_id);
        if (!pa || !pt) throw DataError("train_pipeline: label references unknown profile");
        auto [ia, ok_a] = aux_cache.try_emplace(l.aux_id);
        if (ok_a) ia->second = engine.profile_features(*pa);
        auto [it, ok_t] = target_cache.try_emplace(l.target_id);
        if (ok_t) it->second = engine.profile_features(*pt);
        pairs.push_back({engine.pair(ia->second, it->second, out.layout), l.coupled});
    }

    auto [full_set, imputation] = build_training_set(pairs);
    out.full_set = std::move(full_set);
    out.full_imputation = std::move(imputation);

    auto train_on = [&](const std::vector<std::string>& features) {
        ImputationTable sub_imp;
        TrainingSet sub = restrict_features(out.full_set, out.full_imputation, features, &sub_imp);
        WeightModel m = trainer == TrainerKind::linear_regression
                            ? train_linear(sub)
                            : train_svr(sub, svm.c, svm.epsilon);
        m.imputation = sub_imp;
        return m;
    };

    out.exp1_model = train_on(preset_features(ExperimentPreset::exp1, out.layout, nullptr));
    if (preset == ExperimentPreset::exp1)
        out.model = out.exp1_model;
    else
        out.model = train_on(preset_features(preset, out.layout, &out.exp1_model));
    return out;
}

AttackOutput run_attack(const Corpus& aux_eval, const Corpus& target_eval,
                        const std::vector<PairLabel>& labels, const WeightModel& model,
                        const SimilarityEngine& engine, AttackKind kind,
                        const std::vector<std::string>& victims,
                        std::optional<double> fixed_threshold) {
    AttackOutput out;
    out.matrix = build_score_matrix(aux_eval, target_eval, model, engine);
    MatchResult provisional = kind == AttackKind::targeted
                                  ? targeted_attack(victims, out.matrix, 0.0)
                                  : global_attack(out.matrix, 0.0);
    std::vector<double> grid = default_threshold_grid();
    out.curve = precision_recall_curve(provisional, labels, kind, grid);
    provisional.threshold = fixed_threshold ? *fixed_threshold : out.curve.operating_threshold;
    out.result = provisional;
    out.report = evaluate(out.result, labels, kind);
    return out;
}

BaselineOutput knn_baseline(const Corpus& aux_eval, const Corpus& target_eval,
                            const std::vector<PairLabel>& labels, const TrainingSet& full_train,
                            const ImputationTable& imputation, const SimilarityEngine& engine,
                            int k) {
    FeatureLayout eval_layout = FeatureLayout::build(aux_eval, target_eval);
    std::vector<std::string> storage;
    const std::vector<std::string>& features = obvious_identifier_features(eval_layout, storage);

    ImputationTable sub_imp;
    TrainingSet train = restrict_features(full_train, imputation, features, &sub_imp);

    std::vector<ProfileFeatures> aux_features, target_features;
    aux_features.reserve(aux_eval.profiles.size());
    for (const Profile& p : aux_eval.profiles) aux_features.push_back(engine.profile_features(p));
    target_features.reserve(target_eval.profiles.size());
    for (const Profile& p : target_eval.profiles)
        target_features.push_back(engine.profile_features(p));

    std::unordered_map<std::string, std::string> partner;
    for (const PairLabel& l : labels)
        if (l.coupled) partner[l.aux_id] = l.target_id;

    std::vector<std::size_t> feature_cols;
    for (const std::string& f : features) feature_cols.push_back(*eval_layout.index_of(f));

    BaselineOutput out;
    std::vector<std::vector<double>> rows;
    rows.reserve(target_eval.profiles.size());
    for (std::size_t i = 0; i < aux_eval.profiles.size(); ++i) {
        rows.clear();
        for (std::size_t j = 0; j < target_eval.profiles.size(); ++j) {
            SimilarityVector sv = engine.pair(aux_features[i], target_features[j], eval_layout);
            std::vector<double> row(feature_cols.size());
            for (std::size_t f = 0; f < feature_cols.size(); ++f) {
                const auto& v = sv.values[feature_cols[f]];
                row[f] = v ? *v : sub_imp.values[f];
            }
            rows.push_back(std::move(row));
        }
        std::vector<bool> predictions = knn_predict(train, rows, k);
        auto it = partner.find(aux_eval.profiles[i].profile_id);
        for (std::size_t j = 0; j < predictions.size(); ++j) {
            const bool truly_coupled =
                it != partner.end() && it->second == target_eval.profiles[j].profile_id;
            if (predictions[j] && truly_coupled) ++out.tp;
            else if (predictions[j] && !truly_coupled) ++out.fp;
            else if (!predictions[j] && truly_coupled) ++out.fn;
        }
    }
    if (out.tp + out.fp > 0) out.precision = double(out.tp) / double(out.tp + out.fp);
    if (out.tp + out.fn > 0) out.recall = double(out.tp) / double(out.tp + out.fn);
    return out;
}

void RunManifest::add_input(const std::filesystem::path& p) {
    input_hashes.push_back({p.string(), fnv1a64(read_text_file(p))});
}

void RunManifest::save(const std::filesystem::path& dir) const {
    json j;
    j["command"] = command;
    j["tool_version"] = kToolVersion;
    const auto now = std::chrono::system_clock::now();
    j["timestamp_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    j["seed"] = seed;
    json cfg = json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    json inputs = json::object();
    for (const auto& [path, hash] : input_hashes) {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
        inputs[path] = buf;
    }
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["notes"] = notes;
    j["gender_inference_field_order"] =
        json::array({"given_name", "display_name", "screen_name", "username"});
    if (model_hash) {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(*model_hash));
        j["model_hash"] = buf;
    }
    if (lda_hash) {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(*lda_hash));
        j["lda_model_hash"] = buf;
    }
    write_text_file(dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace relink
