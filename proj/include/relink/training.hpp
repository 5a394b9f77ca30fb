#pragma once
// Weight learning from labeled coupled/uncoupled pairs: ordinary least
// squares or linear epsilon-insensitive support-vector regression, plus the
// missing-similarity imputation rule.
//
// Training is single-threaded and deterministic; trained models are
// immutable and safe for concurrent scoring.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relink/similarity.hpp"

namespace relink {

struct TrainingSet {
    std::vector<std::vector<double>> rows;  // imputed feature vectors
    std::vector<int> labels;                // 1 coupled, 0 uncoupled
    std::vector<std::string> feature_names;
};

struct ImputationTable {
    std::vector<double> values;       // fill value per feature, in [0,1]
    std::vector<bool> fallback_used;  // true when a class had no observations
};

enum class TrainerKind { linear_regression, svm_regression };

struct SvmParams {
    double c = 1.0;
    double epsilon = 0.1;
};

struct WeightModel {
    TrainerKind kind = TrainerKind::linear_regression;
    double w0 = 0.0;
    std::vector<double> weights;
    std::vector<std::string> feature_names;
    ImputationTable imputation;
    std::optional<SvmParams> svm_params;
    bool rank_deficient = false;  // linear fit fell back to the minimum-norm solution
    bool converged = true;        // SVR reached the duality-gap tolerance
};

// Imputation rule: over the grid v in {0, 0.01, ..., 1}, pick the v*
// minimizing Err(v) = P(coupled observed < v) + P(uncoupled observed > v),
// ties resolved toward the smaller v. A feature unobserved in one class
// falls back to the global mean of its observed values (0.5 when it is
// observed nowhere) and is flagged.
std::pair<TrainingSet, ImputationTable> build_training_set(
    std::span<const std::pair<SimilarityVector, bool>> pairs);

double imputation_error(double v, std::span<const double> coupled_observed,
                        std::span<const double> uncoupled_observed);

// Keeps only the named feature columns (order follows `features`).
TrainingSet restrict_features(const TrainingSet& ts, const ImputationTable& imp,
                              std::span<const std::string> features, ImputationTable* imp_out);

// Ordinary least squares of y on (1, x); rank-deficient designs fall back to
// the minimum-norm solution and are flagged.
struct OlsFit {
    double w0 = 0.0;
    std::vector<double> weights;
    bool rank_deficient = false;
};
OlsFit ols_fit(const std::vector<std::vector<double>>& rows, const std::vector<double>& y);

WeightModel train_linear(const TrainingSet& ts);

// Linear epsilon-insensitive SVR solved by coordinate descent on the dual
// with an augmented (regularized) bias feature, run to a duality gap of 1e-6
// or 1e5 passes.
WeightModel train_svr(const TrainingSet& ts, double c, double epsilon);

// w0 + w.x with missing entries filled from the model's imputation table.
// Not clamped; thresholding happens downstream.
double score_pair(const WeightModel& model, const SimilarityVector& v);

// Fast path for matrix construction: layout-resolved feature indices
// (SIZE_MAX marks a feature absent from the layout, scored at its fill value).
std::vector<std::size_t> resolve_feature_indices(const WeightModel& model,
                                                 const FeatureLayout& layout);
double score_resolved(const WeightModel& model, std::span<const std::size_t> indices,
                      std::span<const std::optional<double>> values);

// Primal SVR objective: used by tests and the convergence check.
double svr_primal_objective(const WeightModel& model, const TrainingSet& ts);

void save_model(const WeightModel& model, const std::filesystem::path& path);
WeightModel load_model(const std::filesystem::path& path);
std::uint64_t model_content_hash(const WeightModel& model);

}  // namespace relink
