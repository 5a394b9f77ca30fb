#pragma once
// Domain types for profiles, corpora, and labeled cross-network pairs,
// plus JSON-lines / CSV ingestion.
//
// A corpus is immutable after load; everything downstream reads it
// concurrently without locking.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "relink/util.hpp"

namespace relink {

enum class NameField { screen_name, display_name, given_name, last_name, username };

constexpr NameField kNameFieldOrder[] = {
    NameField::screen_name, NameField::display_name, NameField::given_name,
    NameField::last_name, NameField::username};

std::string_view name_field_str(NameField f);
std::optional<NameField> name_field_from(std::string_view s);

enum class Gender { male, female };

struct Post {
    std::int64_t timestamp = 0;  // UTC epoch seconds
    std::string text;
};

struct Profile {
    std::string profile_id;
    std::string network_id;
    std::vector<std::pair<NameField, std::string>> name_fields;
    std::optional<std::string> location_text;
    std::optional<Gender> declared_gender;
    std::optional<std::vector<double>> photo_embedding;
    // Candidate replacement embeddings (other photos of the same person);
    // consumed only by the countermeasure level enumeration.
    std::vector<std::vector<double>> alt_photo_embeddings;
    std::optional<std::string> freetext;
    std::vector<Post> posts;  // kept sorted ascending by timestamp

    // First value of the given kind, if any.
    const std::string* name_of(NameField kind) const;
};

struct Corpus {
    std::string network_id;
    std::vector<Profile> profiles;
    std::size_t embedding_dim = 0;

    const Profile* find(const std::string& profile_id) const;
    std::size_t index_of(const std::string& profile_id) const;  // throws DataError if absent

    void rebuild_index();

private:
    std::unordered_map<std::string, std::size_t> index_;
};

struct PairLabel {
    std::string aux_id;
    std::string target_id;
    bool coupled = false;
};

// JSON-lines, one profile object per line. Unknown fields are ignored;
// posts come back sorted by timestamp. Throws DataError with the offending
// line number on parse or invariant failures.
Corpus load_corpus(const std::filesystem::path& path, const std::string& network_id);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// CSV with header aux_id,target_id,coupled. Every id must resolve in the
// respective corpus; a profile may have at most one coupled partner.
std::vector<PairLabel> load_labels(const std::filesystem::path& path,
                                   const Corpus& aux, const Corpus& target);
void save_labels(const std::vector<PairLabel>& labels, const std::filesystem::path& path);

}  // namespace relink
