#pragma once
// Paired-corpora generator with ground-truth coupled personas and per-
// attribute noise knobs, standing in for crawled social-network data.
//
// Generation is sequential and bit-deterministic for a fixed config. Noise
// is applied through per-persona, per-attribute random streams that do not
// depend on the knob values, so raising one knob degrades exactly that
// attribute (common random numbers across noise levels).

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "relink/corpus.hpp"
#include "relink/reference.hpp"

namespace relink {

struct GeneratorConfig {
    std::size_t n_coupled = 0;
    std::size_t n_uncoupled_per_side = 0;
    std::uint64_t seed = 1;

    // rates in [0,1]
    double name_edit_rate = 0.0;     // fraction of name characters substituted per side
    double gender_flip_rate = 0.0;   // probability the declared gender flips per side
    double freetext_overlap = 0.0;   // fraction of freetext entities replaced on the target side
    double topic_drift = 0.0;        // per-post probability of resampling from a drifted mixture
    double sentiment_drift = 0.0;    // per-post probability of flipped sentiment polarity

    // nonnegative scales
    double location_jitter_km = 0.0;  // displacement before snapping to the nearest gazetteer entry
    double photo_noise_sigma = 0.0;   // spherical Gaussian noise on the embedding per side
    double activity_jitter_s = 0.0;   // Gaussian timestamp jitter on the target side, seconds

    // per-attribute missing rates in [0,1]
    double missing_location = 0.0;
    double missing_gender = 0.0;
    double missing_photo = 0.0;
    double missing_freetext = 0.0;
    double missing_posts = 0.0;

    std::size_t posts_per_profile = 20;
    std::size_t embedding_dim = 16;

    void validate() const;  // throws DataError on out-of-range knobs

    // key=value lines, '#' comments; unknown keys rejected
    static GeneratorConfig from_file(const std::filesystem::path& path);
    static GeneratorConfig from_kv(const std::vector<std::pair<std::string, std::string>>& kv);
    std::vector<std::pair<std::string, std::string>> to_kv() const;
};

// Topic/word and entity pools the personas draw from; plain-text format:
//   topic <name>: <word> <word> ...
//   entity <text>
//   name <first-name>
struct VocabSpec {
    struct Topic {
        std::string name;
        std::vector<std::string> words;
    };
    std::vector<Topic> topics;
    std::vector<std::string> entities;
    std::vector<std::string> first_names;

    static VocabSpec load(const std::filesystem::path& path);
    static VocabSpec builtin();  // small spec with disjoint topic vocabularies
};

struct SynthOutput {
    Corpus aux;
    Corpus target;
    std::vector<PairLabel> labels;
};

SynthOutput generate(const GeneratorConfig& config, const Gazetteer& gaz,
                     const SentimentLexicon& lexicon, const VocabSpec& vocab);

}  // namespace relink
