#include "relink/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "relink/util.hpp"

namespace relink {

std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.empty()) return b.size();
    if (b.empty()) return a.size();
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double username_similarity(std::string_view a, std::string_view b) {
    std::string fa = to_lower(a), fb = to_lower(b);
    std::size_t longest = std::max(fa.size(), fb.size());
    if (longest == 0) return 1.0;
    return 1.0 - double(levenshtein(fa, fb)) / double(longest);
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    constexpr double kEarthRadiusKm = 6371.0;  // mean radius
    constexpr double kDegToRad = 0.017453292519943295;
    const double p1 = lat1 * kDegToRad, p2 = lat2 * kDegToRad;
    const double dlat = (lat2 - lat1) * kDegToRad;
    const double dlon = (lon2 - lon1) * kDegToRad;
    const double sa = std::sin(dlat / 2.0), so = std::sin(dlon / 2.0);
    const double h = sa * sa + std::cos(p1) * std::cos(p2) * so * so;
    return 2.0 * kEarthRadiusKm * std::atan2(std::sqrt(h), std::sqrt(std::max(0.0, 1.0 - h)));
}

namespace {

std::optional<double> location_similarity_cached(const std::optional<std::string>& norm_a,
                                                 const std::optional<Coord>& coord_a,
                                                 const std::optional<std::string>& norm_b,
                                                 const std::optional<Coord>& coord_b,
                                                 const NormalizationSpec& norm) {
    if (!coord_a || !coord_b) return std::nullopt;
    if (norm_a && norm_b && *norm_a == *norm_b) return 1.0;
    double gd = haversine_km(coord_a->lat, coord_a->lon, coord_b->lat, coord_b->lon);
    return 1.0 - std::min(gd / norm.location_scale_km, 1.0);
}

std::optional<double> gender_similarity_cached(const std::optional<Gender>& da,
                                               const std::optional<double>& pa,
                                               const std::optional<Gender>& db,
                                               const std::optional<double>& pb) {
    if (da && db) return *da == *db ? 1.0 : 0.0;
    if (da && pb) return *da == Gender::male ? *pb : 1.0 - *pb;
    if (db && pa) return *db == Gender::male ? *pa : 1.0 - *pa;
    if (pa && pb) return *pa * *pb + (1.0 - *pa) * (1.0 - *pb);
    return std::nullopt;
}

}  // namespace

std::optional<double> location_similarity(const std::optional<std::string>& a,
                                          const std::optional<std::string>& b,
                                          const Gazetteer& gaz, const NormalizationSpec& norm) {
    std::optional<std::string> na, nb;
    std::optional<Coord> ca, cb;
    if (a) {
        na = normalize_key(*a);
        ca = gaz.geocode(*a);
    }
    if (b) {
        nb = normalize_key(*b);
        cb = gaz.geocode(*b);
    }
    return location_similarity_cached(na, ca, nb, cb, norm);
}

std::optional<std::string> gender_inference_name(const Profile& p) {
    for (NameField f : kGenderInferenceOrder)
        if (const std::string* n = p.name_of(f)) return *n;
    return std::nullopt;
}

std::optional<double> gender_similarity(const Profile& a, const Profile& b,
                                        const NameGenderTable& table) {
    auto infer = [&](const Profile& p) -> std::optional<double> {
        if (p.declared_gender) return std::nullopt;
        if (auto name = gender_inference_name(p)) return table.probability_male(*name);
        return std::nullopt;
    };
    return gender_similarity_cached(a.declared_gender, infer(a), b.declared_gender, infer(b));
}

std::optional<double> photo_similarity(const std::optional<std::vector<double>>& a,
                                       const std::optional<std::vector<double>>& b) {
    if (!a || !b) return std::nullopt;
    if (a->size() != b->size())
        throw DataError("photo_similarity: embedding length mismatch (" +
                        std::to_string(a->size()) + " vs " + std::to_string(b->size()) + ")");
    double d = 0.0;
    for (std::size_t i = 0; i < a->size(); ++i) {
        double diff = (*a)[i] - (*b)[i];
        d += diff * diff;
    }
    d = std::clamp(d, 0.0, 4.0);
    return 1.0 - d / 4.0;
}

std::optional<double> entity_cosine(const std::map<std::string, int>& a,
                                    const std::map<std::string, int>& b) {
    if (a.empty() || b.empty()) return std::nullopt;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [tok, fa] : a) {
        na += double(fa) * fa;
        auto it = b.find(tok);
        if (it != b.end()) dot += double(fa) * it->second;
    }
    for (const auto& [tok, fb] : b) nb += double(fb) * fb;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::optional<double> freetext_similarity(const std::optional<std::string>& a,
                                          const std::optional<std::string>& b) {
    if (!a || !b) return std::nullopt;
    return entity_cosine(extract_entities(*a), extract_entities(*b));
}

std::optional<double> activity_similarity(std::span<const std::int64_t> a,
                                          std::span<const std::int64_t> b,
                                          const NormalizationSpec& norm) {
    if (a.empty() || b.empty()) return std::nullopt;
    for (std::size_t i = 1; i < a.size(); ++i)
        if (a[i] < a[i - 1]) throw DataError("activity_similarity: unsorted timestamps");
    for (std::size_t i = 1; i < b.size(); ++i)
        if (b[i] < b[i - 1]) throw DataError("activity_similarity: unsorted timestamps");

    struct Gap {
        std::int64_t diff;
        std::uint32_t i, j;
    };
    std::vector<Gap> gaps;
    gaps.reserve(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            gaps.push_back({std::abs(a[i] - b[j]), std::uint32_t(i), std::uint32_t(j)});
    std::sort(gaps.begin(), gaps.end(), [](const Gap& x, const Gap& y) {
        if (x.diff != y.diff) return x.diff < y.diff;
        if (x.i != y.i) return x.i < y.i;
        return x.j < y.j;
    });

    const std::size_t want = std::min(a.size(), b.size());
    std::vector<bool> used_a(a.size(), false), used_b(b.size(), false);
    std::size_t taken = 0;
    double total = 0.0;
    for (const Gap& g : gaps) {
        if (taken == want) break;
        if (used_a[g.i] || used_b[g.j]) continue;
        used_a[g.i] = used_b[g.j] = true;
        total += double(g.diff);
        ++taken;
    }
    const double mean_gap = total / double(want);
    return 1.0 - std::min(mean_gap / double(norm.activity_horizon_s), 1.0);
}

double interest_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty())
        throw DataError("interest_similarity: distribution length mismatch");
    auto check = [](std::span<const double> d) {
        double sum = 0.0;
        for (double x : d) {
            if (x < 0.0) throw DataError("interest_similarity: negative probability");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw DataError("interest_similarity: input does not sum to 1");
    };
    check(a);
    check(b);
    double l1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i] - b[i]);
    return 1.0 - l1 / double(a.size());
}

std::map<std::int64_t, std::pair<double, double>> daily_sentiment_profile(
    std::span<const Post> posts, const SentimentLexicon& lex) {
    std::map<std::int64_t, std::pair<double, double>> sums;
    std::map<std::int64_t, std::size_t> counts;
    for (const Post& p : posts) {
        const std::int64_t day = p.timestamp / 86400;  // UTC calendar day
        auto [pos, neg] = lex.scores(p.text);
        sums[day].first += pos;
        sums[day].second += neg;
        ++counts[day];
    }
    for (auto& [day, s] : sums) {
        s.first /= double(counts[day]);
        s.second /= double(counts[day]);
    }
    return sums;
}

std::optional<double> sentiment_similarity(std::span<const Post> a, std::span<const Post> b,
                                           const SentimentLexicon& lex) {
    auto da = daily_sentiment_profile(a, lex);
    auto db = daily_sentiment_profile(b, lex);
    double total = 0.0;
    std::size_t shared = 0;
    for (const auto& [day, sa] : da) {
        auto it = db.find(day);
        if (it == db.end()) continue;
        total += (std::abs(sa.first - it->second.first) + std::abs(sa.second - it->second.second)) / 2.0;
        ++shared;
    }
    if (shared == 0) return std::nullopt;
    return 1.0 - total / double(shared);
}

// ---- feature layout ----

std::string NameCombo::feature_name() const {
    return "name:" + std::string(name_field_str(aux_field)) + "|" +
           std::string(name_field_str(target_field));
}

std::vector<NameCombo> name_combinations(const Corpus& aux, const Corpus& target) {
    auto kinds_present = [](const Corpus& c) {
        std::vector<NameField> kinds;
        for (NameField f : kNameFieldOrder) {
            for (const Profile& p : c.profiles) {
                if (p.name_of(f)) {
                    kinds.push_back(f);
                    break;
                }
            }
        }
        return kinds;
    };
    std::vector<NameCombo> combos;
    for (NameField fa : kinds_present(aux))
        for (NameField ft : kinds_present(target)) combos.push_back({fa, ft});
    return combos;
}

const char* kAttributeFeatureNames[] = {"location", "gender",   "photo",    "freetext",
                                        "activity", "interest", "sentiment"};

FeatureLayout FeatureLayout::build(const Corpus& aux, const Corpus& target) {
    FeatureLayout layout;
    layout.combos = name_combinations(aux, target);
    for (const NameCombo& c : layout.combos) layout.names.push_back(c.feature_name());
    for (const char* n : kAttributeFeatureNames) layout.names.emplace_back(n);
    return layout;
}

std::optional<std::size_t> FeatureLayout::index_of(std::string_view feature) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == feature) return i;
    return std::nullopt;
}

bool FeatureLayout::is_name_feature(std::string_view feature) {
    return feature.rfind("name:", 0) == 0;
}

std::optional<double> SimilarityVector::by_name(std::string_view feature) const {
    if (!layout) return std::nullopt;
    auto idx = layout->index_of(feature);
    if (!idx) return std::nullopt;
    return values[*idx];
}

// ---- engine ----

ProfileFeatures SimilarityEngine::profile_features(const Profile& p) const {
    ProfileFeatures f;
    for (NameField kind : kNameFieldOrder)
        if (const std::string* n = p.name_of(kind)) f.names[kind] = *n;
    if (p.location_text) {
        f.location_norm = normalize_key(*p.location_text);
        f.coord = providers_->gazetteer.geocode(*p.location_text);
    }
    f.declared_gender = p.declared_gender;
    if (!p.declared_gender)
        if (auto name = gender_inference_name(p))
            f.inferred_prob_male = providers_->names.probability_male(*name);
    f.photo = p.photo_embedding;
    if (p.freetext) {
        f.has_freetext = true;
        f.entities = extract_entities(*p.freetext);
    }
    f.timestamps.reserve(p.posts.size());
    for (const Post& post : p.posts) f.timestamps.push_back(post.timestamp);
    if (lda_ && !p.posts.empty()) f.topics = profile_topic_distribution(*lda_, p.posts);
    f.daily_sentiment = daily_sentiment_profile(p.posts, providers_->lexicon);
    return f;
}

SimilarityVector SimilarityEngine::pair(const ProfileFeatures& a, const ProfileFeatures& b,
                                        const FeatureLayout& layout) const {
    SimilarityVector sv;
    sv.layout = &layout;
    sv.values.reserve(layout.size());

    for (const NameCombo& combo : layout.combos) {
        auto ia = a.names.find(combo.aux_field);
        auto ib = b.names.find(combo.target_field);
        if (ia == a.names.end() || ib == b.names.end())
            sv.values.emplace_back(std::nullopt);
        else
            sv.values.emplace_back(username_similarity(ia->second, ib->second));
    }

    sv.values.push_back(location_similarity_cached(a.location_norm, a.coord, b.location_norm,
                                                   b.coord, norm_));
    sv.values.push_back(gender_similarity_cached(a.declared_gender, a.inferred_prob_male,
                                                 b.declared_gender, b.inferred_prob_male));
    sv.values.push_back(photo_similarity(a.photo, b.photo));
    sv.values.push_back((a.has_freetext && b.has_freetext) ? entity_cosine(a.entities, b.entities)
                                                           : std::nullopt);
    sv.values.push_back(activity_similarity(a.timestamps, b.timestamps, norm_));
    if (a.topics && b.topics)
        sv.values.push_back(interest_similarity(*a.topics, *b.topics));
    else
        sv.values.emplace_back(std::nullopt);

    {
        double total = 0.0;
        std::size_t shared = 0;
        for (const auto& [day, sa] : a.daily_sentiment) {
            auto it = b.daily_sentiment.find(day);
            if (it == b.daily_sentiment.end()) continue;
            total += (std::abs(sa.first - it->second.first) +
                      std::abs(sa.second - it->second.second)) /
                     2.0;
            ++shared;
        }
        sv.values.push_back(shared ? std::optional<double>(1.0 - total / double(shared))
                                   : std::nullopt);
    }
    return sv;
}

SimilarityVector compute_similarity_vector(const Profile& a, const Profile& b,
                                           const Providers& providers, const LdaModel* lda,
                                           const NormalizationSpec& norm,
                                           const FeatureLayout& layout) {
    SimilarityEngine engine(providers, lda, norm);
    return engine.pair(engine.profile_features(a), engine.profile_features(b), layout);
}

}  // namespace relink
