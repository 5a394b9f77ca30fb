#pragma once
// File-backed providers standing in for the external services the matching
// pipeline depends on: a gazetteer for geocoding, a first-name gender table,
// a sentiment lexicon, and a rule-based entity extractor.
//
// All providers are immutable after load and safe for concurrent reads.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace relink {

struct Coord {
    double lat = 0.0;  // degrees, [-90, 90]
    double lon = 0.0;  // degrees, [-180, 180]
};

class Gazetteer {
public:
    // CSV `place,lat,lon`; place strings with commas must be quoted.
    static Gazetteer load(const std::filesystem::path& path);

    // Lookup on the normalized key (lowercase, trimmed, whitespace collapsed).
    // A key matching the country suffix of known entries resolves to the
    // centroid of those entries, so generalize-to-country stays geocodable.
    std::optional<Coord> geocode(std::string_view place) const;

    // Country suffix (text after the last comma) for a known place, if any.
    std::optional<std::string> country_of(std::string_view place) const;

    const std::map<std::string, Coord>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    void add(std::string_view place, Coord c);  // used by the synthetic generator tests
    void finalize();                            // recompute country centroids

private:
    std::map<std::string, Coord> entries_;
    std::map<std::string, Coord> country_centroids_;
};

class NameGenderTable {
public:
    // CSV `name,male_count,female_count`, counts aggregated across years.
    static NameGenderTable load(const std::filesystem::path& path);

    // P(male) for the first whitespace token of the normalized name;
    // empty when the token is unknown.
    std::optional<double> probability_male(std::string_view name) const;

    std::size_t size() const { return rows_.size(); }
    void add(std::string_view name, std::uint64_t male, std::uint64_t female);

private:
    std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> rows_;
};

class SentimentLexicon {
public:
    // Two newline-delimited token files; the sets must be disjoint.
    static SentimentLexicon load(const std::filesystem::path& positive,
                                 const std::filesystem::path& negative);

    // (p_pos, p_neg), nonnegative, summing to exactly 1; (0.5, 0.5) when the
    // text carries no lexicon hits.
    std::pair<double, double> scores(std::string_view text) const;

    bool contains_positive(const std::string& tok) const { return positive_.count(tok) > 0; }
    bool contains_negative(const std::string& tok) const { return negative_.count(tok) > 0; }

    void add_positive(std::string tok);
    void add_negative(std::string tok);

    // Sorted copies, for callers that need indexable word pools.
    std::vector<std::string> positive_tokens() const;
    std::vector<std::string> negative_tokens() const;

private:
    std::unordered_set<std::string> positive_;
    std::unordered_set<std::string> negative_;
};

// Feature tokens extracted from freetext: capitalized-word runs, dates,
// times, money, and percent tokens, lowercased, with multiplicity.
// A sentence-initial capitalized word joins a run only if it recurs
// capitalized mid-sentence elsewhere in the same text.
std::map<std::string, int> extract_entities(std::string_view text);

// Renders an entity multiset back into text the extractor parses to exactly
// that multiset. Used when a countermeasure plan rewrites a freetext field.
std::string render_entities(const std::map<std::string, int>& entities);

}  // namespace relink
