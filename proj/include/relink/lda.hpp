#pragma once
// Latent Dirichlet Allocation by collapsed Gibbs sampling, with fold-in
// inference for unseen documents. Fitting is sequential and fully
// deterministic for a fixed seed; inference against a frozen model is safe
// to run concurrently.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relink/corpus.hpp"

namespace relink {

struct LdaModel {
    std::size_t theta = 0;  // number of topics
    double alpha = 0.0;     // symmetric document-topic prior
    double beta = 0.0;      // symmetric topic-word prior
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    std::map<std::string, std::size_t> vocabulary;    // token -> column
    std::vector<std::vector<double>> topic_word;      // theta x V, rows sum to 1

    std::uint64_t content_hash() const;  // recorded in run manifests
};

// Lowercase alphanumeric tokens of length >= 2, stopwords removed.
std::vector<std::string> lda_tokenize(std::string_view text);

LdaModel fit_lda(const std::vector<std::string>& corpus_texts, std::size_t theta, double alpha,
                 double beta, std::size_t iterations, std::uint64_t seed);

// Fold-in Gibbs with frozen topic-word probabilities (50 sweeps, seeded from
// the model seed and a document hash). No in-vocabulary tokens -> uniform.
std::vector<double> infer_topics(const LdaModel& model, std::string_view document);

// Mean of infer_topics over the posts; uniform when there are none.
std::vector<double> profile_topic_distribution(const LdaModel& model, std::span<const Post> posts);

void save_lda(const LdaModel& model, const std::filesystem::path& path);
LdaModel load_lda(const std::filesystem::path& path);

struct LdaParams {
    std::size_t theta = 20;
    double alpha = 2.5;   // 50/theta
    double beta = 0.01;
    std::size_t iterations = 500;
    std::size_t sample_cap = 15000;  // posts sampled across both corpora
};

inline LdaParams default_lda_params(std::size_t theta = 20) {
    LdaParams p;
    p.theta = theta;
    p.alpha = 50.0 / double(theta);
    return p;
}

}  // namespace relink
