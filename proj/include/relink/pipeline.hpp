#pragma once
// End-to-end orchestration: train a weight model on labeled pairs, run the
// attack over evaluation corpora, evaluate, and run countermeasure sweeps.
// The CLI is a thin argument-parsing wrapper over these calls; acceptance
// tests drive them directly.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "relink/countermeasures.hpp"
#include "relink/evaluation.hpp"
#include "relink/lda.hpp"
#include "relink/matching.hpp"
#include "relink/similarity.hpp"
#include "relink/synth.hpp"
#include "relink/training.hpp"

namespace relink {

enum class ExperimentPreset { exp1, exp2, exp3, exp4 };
std::string_view preset_str(ExperimentPreset p);
std::optional<ExperimentPreset> preset_from(std::string_view s);

// Feature subsets per preset. exp2 derives the four most identifying
// features (best name combination plus the top three attributes) from the
// exp1 weights of the same run.
std::vector<std::string> preset_features(ExperimentPreset preset, const FeatureLayout& layout,
                                         const WeightModel* exp1_model);

// Deterministic sample of up to `cap` post texts across both corpora.
std::vector<std::string> sample_post_texts(const Corpus& a, const Corpus& b, std::size_t cap,
                                           std::uint64_t seed);

LdaModel fit_pipeline_lda(const Corpus& aux_train, const Corpus& target_train,
                          const LdaParams& params, std::uint64_t seed);

struct TrainOutput {
    WeightModel model;
    FeatureLayout layout;
    TrainingSet full_set;            // all features, imputed
    ImputationTable full_imputation;
    WeightModel exp1_model;          // the all-features model backing exp2 selection
};

TrainOutput train_pipeline(const Corpus& aux_train, const Corpus& target_train,
                           const std::vector<PairLabel>& labels, const SimilarityEngine& engine,
                           ExperimentPreset preset, TrainerKind trainer,
                           const SvmParams& svm = {});

struct AttackOutput {
    ScoreMatrix matrix;
    MatchResult result;
    EvalReport report;           // at the operating threshold
    Curve curve;
};

AttackOutput run_attack(const Corpus& aux_eval, const Corpus& target_eval,
                        const std::vector<PairLabel>& labels, const WeightModel& model,
                        const SimilarityEngine& engine, AttackKind kind,
                        const std::vector<std::string>& victims = {},
                        std::optional<double> fixed_threshold = std::nullopt);

// KNN baseline over every cross pair of the evaluation corpora, on the
// obvious-identifier feature subset; returns (precision, recall).
struct BaselineOutput {
    long tp = 0, fp = 0, fn = 0;
    std::optional<double> precision;
    std::optional<double> recall;
};
BaselineOutput knn_baseline(const Corpus& aux_eval, const Corpus& target_eval,
                            const std::vector<PairLabel>& labels, const TrainingSet& full_train,
                            const ImputationTable& imputation, const SimilarityEngine& engine,
                            int k);

// Run manifest: one per output directory.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::pair<std::string, std::uint64_t>> input_hashes;
    std::vector<std::string> outputs;
    std::vector<std::string> notes;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> model_hash;
    std::optional<std::uint64_t> lda_hash;

    void add_input(const std::filesystem::path& p);
    void save(const std::filesystem::path& dir) const;  // writes manifest.json
};

extern const char* kToolVersion;

}  // namespace relink
