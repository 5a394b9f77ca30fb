#pragma once
// The eight per-attribute similarity metrics, each mapping a profile pair to
// a score in [0,1] or to "missing" (std::nullopt). Missing values flow into
// the trainer's imputation table downstream.
//
// Every metric is a pure function of immutable inputs; pairwise matrices can
// be computed by any number of workers with deterministic results.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relink/corpus.hpp"
#include "relink/lda.hpp"
#include "relink/reference.hpp"

namespace relink {

struct NormalizationSpec {
    double location_scale_km = 20015.1;      // half Earth circumference
    std::int64_t activity_horizon_s = 86400;  // one day
};

std::size_t levenshtein(std::string_view a, std::string_view b);

// 1 - lev(a,b)/max(|a|,|b|) on case-folded inputs; both empty -> 1.
double username_similarity(std::string_view a, std::string_view b);

double haversine_km(double lat1, double lon1, double lat2, double lon2);

// Exact normalized-text match -> 1; otherwise 1 - min(GD/scale, 1) on
// geocoded coordinates. Either side absent or un-geocodable -> missing.
std::optional<double> location_similarity(const std::optional<std::string>& a,
                                          const std::optional<std::string>& b,
                                          const Gazetteer& gaz, const NormalizationSpec& norm);

// Declared genders compare exactly; a missing declaration falls back to the
// name-table inference probability. Agreement probability when both inferred.
std::optional<double> gender_similarity(const Profile& a, const Profile& b,
                                        const NameGenderTable& table);

// The field used for gender inference, in lookup order.
std::optional<std::string> gender_inference_name(const Profile& p);
constexpr NameField kGenderInferenceOrder[] = {NameField::given_name, NameField::display_name,
                                               NameField::screen_name, NameField::username};

// Squared Euclidean distance clamped to the face-recognizer operating range
// [0,4], rescaled so 1 means identical.
std::optional<double> photo_similarity(const std::optional<std::vector<double>>& a,
                                       const std::optional<std::vector<double>>& b);

// Cosine similarity of entity-frequency vectors. Missing when either text is
// absent or yields no entities.
std::optional<double> freetext_similarity(const std::optional<std::string>& a,
                                          const std::optional<std::string>& b);
std::optional<double> entity_cosine(const std::map<std::string, int>& a,
                                    const std::map<std::string, int>& b);

// Greedy disjoint pairing of timestamps by smallest absolute gap; score is
// 1 - min(mean_gap/horizon, 1). Missing when either list is empty.
std::optional<double> activity_similarity(std::span<const std::int64_t> a,
                                          std::span<const std::int64_t> b,
                                          const NormalizationSpec& norm);

// 1 - (1/theta) * L1(a, b); both inputs must be distributions of equal length.
double interest_similarity(std::span<const double> a, std::span<const double> b);

// Mean daily distance between per-day (p_pos, p_neg) profiles over shared
// days. Missing when no day has posts on both sides.
std::optional<double> sentiment_similarity(std::span<const Post> a, std::span<const Post> b,
                                           const SentimentLexicon& lex);

// day -> (mean p_pos, mean p_neg) over that UTC day's posts
std::map<std::int64_t, std::pair<double, double>> daily_sentiment_profile(
    std::span<const Post> posts, const SentimentLexicon& lex);

// ---- feature layout and the combined similarity vector ----

struct NameCombo {
    NameField aux_field;
    NameField target_field;
    std::string feature_name() const;
};

// Cross product of the name-field kinds present on each side, in canonical
// field order; determines the name-similarity feature columns.
std::vector<NameCombo> name_combinations(const Corpus& aux, const Corpus& target);

struct FeatureLayout {
    std::vector<NameCombo> combos;
    std::vector<std::string> names;  // combo names followed by the 7 attribute names

    static FeatureLayout build(const Corpus& aux, const Corpus& target);
    std::size_t size() const { return names.size(); }
    std::size_t name_feature_count() const { return combos.size(); }
    std::optional<std::size_t> index_of(std::string_view feature) const;
    static bool is_name_feature(std::string_view feature);
};

struct SimilarityVector {
    const FeatureLayout* layout = nullptr;
    std::vector<std::optional<double>> values;  // aligned with layout->names

    std::optional<double> by_name(std::string_view feature) const;
};

struct Providers {
    Gazetteer gazetteer;
    NameGenderTable names;
    SentimentLexicon lexicon;
};

// Per-profile precomputation so pairwise scoring stays cheap.
struct ProfileFeatures {
    std::map<NameField, std::string> names;  // first value per kind
    std::optional<std::string> location_norm;
    std::optional<Coord> coord;
    std::optional<Gender> declared_gender;
    std::optional<double> inferred_prob_male;
    std::optional<std::vector<double>> photo;
    bool has_freetext = false;
    std::map<std::string, int> entities;
    std::vector<std::int64_t> timestamps;
    std::optional<std::vector<double>> topics;  // absent when no posts or no model
    std::map<std::int64_t, std::pair<double, double>> daily_sentiment;
};

class SimilarityEngine {
public:
    SimilarityEngine(const Providers& providers, const LdaModel* lda, NormalizationSpec norm)
        : providers_(&providers), lda_(lda), norm_(norm) {}

    ProfileFeatures profile_features(const Profile& p) const;
    SimilarityVector pair(const ProfileFeatures& a, const ProfileFeatures& b,
                          const FeatureLayout& layout) const;

    const NormalizationSpec& norm() const { return norm_; }
    const Providers& providers() const { return *providers_; }
    const LdaModel* lda() const { return lda_; }

private:
    const Providers* providers_;
    const LdaModel* lda_;
    NormalizationSpec norm_;
};

// One-shot convenience wrapper over the engine.
SimilarityVector compute_similarity_vector(const Profile& a, const Profile& b,
                                           const Providers& providers, const LdaModel* lda,
                                           const NormalizationSpec& norm,
                                           const FeatureLayout& layout);

}  // namespace relink
