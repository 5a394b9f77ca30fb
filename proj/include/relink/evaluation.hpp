#pragma once
// Precision/recall/success-rate accounting for targeted and global attacks,
// the threshold sweep, and the KNN pair classifier used as a baseline.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relink/matching.hpp"
#include "relink/training.hpp"

namespace relink {

enum class AttackKind { global, targeted };

struct EvalReport {
    long tp = 0, fp = 0, tn = 0, fn = 0;
    std::optional<double> precision;  // empty when tp+fp == 0
    std::optional<double> recall;     // empty when tp+fn == 0
    double success_rate = 0.0;        // threshold-independent
    long coupled_total = 0;           // coupled pairs inside the evaluated universe
    long coupled_matched = 0;         // of those, matched to each other
    double threshold = 0.0;
    AttackKind attack_kind = AttackKind::global;
};

// Confusion rules:
//  - a coupled pair matched to each other counts tp (>= threshold) or fn;
//  - each profile of a coupled pair matched to a wrong partner counts fp
//    (>= threshold) or tn;
//  - in the global attack an assignment joining two profiles that belong to
//    no coupled pair additionally counts fp (>= threshold) or tn.
// Labels referencing profiles outside the result's universe are ignored for
// the success denominator; unknown-profile labels raise DataError.
EvalReport evaluate(const MatchResult& result, std::span<const PairLabel> labels,
                    AttackKind kind);

struct CurvePoint {
    double threshold = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
};

struct Curve {
    std::vector<CurvePoint> points;
    double operating_threshold = 0.0;  // grid point minimizing |precision - recall|
};

Curve precision_recall_curve(const MatchResult& result, std::span<const PairLabel> labels,
                             AttackKind kind, std::span<const double> grid);

std::vector<double> default_threshold_grid();  // 0.00, 0.02, ..., 1.00

// Majority vote among the k nearest training rows by Euclidean distance;
// distance ties resolve toward the smaller training-row index, exact vote
// ties predict uncoupled. Requires 1 <= k <= training size.
std::vector<bool> knn_predict(const TrainingSet& train,
                              std::span<const std::vector<double>> test_rows, int k);

const std::vector<std::string>& obvious_identifier_features(const FeatureLayout& layout,
                                                            std::vector<std::string>& storage);

void save_eval_json(const EvalReport& report, const Curve& curve,
                    const std::filesystem::path& path);
void save_curve_csv(const Curve& curve, const std::filesystem::path& path);

}  // namespace relink
