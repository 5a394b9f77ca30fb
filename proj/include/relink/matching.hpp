#pragma once
// Pairwise score-matrix construction and one-to-one assignment via the
// Hungarian algorithm, for the global and targeted attacks.
//
// Matrix construction parallelizes by row; the assignment solve itself is
// single-threaded. Results are deterministic regardless of worker count.

#include <filesystem>
#include <string>
#include <vector>

#include "relink/corpus.hpp"
#include "relink/similarity.hpp"
#include "relink/training.hpp"

namespace relink {

struct ScoreMatrix {
    std::vector<std::string> aux_ids;
    std::vector<std::string> target_ids;
    std::vector<std::vector<double>> scores;  // aux x target
};

struct MatchPair {
    std::string aux_id;
    std::string target_id;
    double score = 0.0;
};

struct MatchResult {
    std::vector<MatchPair> assignments;  // one entry per matched real pair
    double threshold = 0.0;
    std::vector<std::string> aux_ids;     // evaluation universe (matrix rows)
    std::vector<std::string> target_ids;  // evaluation universe (matrix columns)

    std::vector<MatchPair> accepted() const;  // score >= threshold
};

// Maximum-total-score assignment. Rectangular inputs are padded internally
// with a large-negative sentinel; padded matches come back as -1. O(n^3).
std::vector<int> hungarian_assign(const std::vector<std::vector<double>>& scores);

constexpr double kDummyScore = -1e9;

ScoreMatrix build_score_matrix(const Corpus& aux, const Corpus& target, const WeightModel& model,
                               const SimilarityEngine& engine, std::size_t workers = 0);

MatchResult global_attack(const ScoreMatrix& matrix, double threshold);

// Matrix restricted to the victim columns, then assigned as in the global
// attack. Victims must exist in the matrix's target ids.
MatchResult targeted_attack(const std::vector<std::string>& victims, const ScoreMatrix& matrix,
                            double threshold);

void save_matrix_csv(const ScoreMatrix& m, const std::filesystem::path& path);
void save_matches_csv(const MatchResult& r, const std::filesystem::path& path);
MatchResult load_matches_csv(const std::filesystem::path& path, double threshold);

}  // namespace relink
