#include "relink/corpus.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

namespace relink {

using json = nlohmann::json;

std::string_view name_field_str(NameField f) {
    switch (f) {
        case NameField::screen_name: return "screen_name";
        case NameField::display_name: return "display_name";
        case NameField::given_name: return "given_name";
        case NameField::last_name: return "last_name";
        case NameField::username: return "username";
    }
    return "?";
}

std::optional<NameField> name_field_from(std::string_view s) {
    for (NameField f : kNameFieldOrder)
        if (name_field_str(f) == s) return f;
    return std::nullopt;
}

const std::string* Profile::name_of(NameField kind) const {
    for (const auto& [k, v] : name_fields)
        if (k == kind) return &v;
    return nullptr;
}

const Profile* Corpus::find(const std::string& profile_id) const {
    auto it = index_.find(profile_id);
    return it == index_.end() ? nullptr : &profiles[it->second];
}

std::size_t Corpus::index_of(const std::string& profile_id) const {
    auto it = index_.find(profile_id);
    if (it == index_.end())
        throw DataError("unknown profile id '" + profile_id + "' in corpus " + network_id);
    return it->second;
}

void Corpus::rebuild_index() {
    index_.clear();
    index_.reserve(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        auto [it, inserted] = index_.emplace(profiles[i].profile_id, i);
        if (!inserted)
            throw DataError("duplicate profile_id '" + profiles[i].profile_id + "'");
    }
}

namespace {

std::vector<double> parse_embedding(const json& j, std::size_t line_no) {
    if (!j.is_array())
        throw DataError("line " + std::to_string(line_no) + ": photo embedding must be an array");
    std::vector<double> v;
    v.reserve(j.size());
    for (const auto& x : j) v.push_back(x.get<double>());
    return v;
}

Profile parse_profile(const json& j, const std::string& network_id, std::size_t line_no) {
    Profile p;
    if (!j.contains("profile_id") || !j["profile_id"].is_string() ||
        j["profile_id"].get<std::string>().empty())
        throw DataError("line " + std::to_string(line_no) + ": missing or empty profile_id");
    p.profile_id = j["profile_id"].get<std::string>();
    p.network_id = j.value("network_id", network_id);

    if (j.contains("name_fields")) {
        for (const auto& pair : j["name_fields"]) {
            if (!pair.is_array() || pair.size() != 2)
                throw DataError("line " + std::to_string(line_no) +
                                ": name_fields entries must be [kind, text] pairs");
            auto kind = name_field_from(pair[0].get<std::string>());
            if (!kind)
                throw DataError("line " + std::to_string(line_no) + ": unknown name field kind '" +
                                pair[0].get<std::string>() + "'");
            p.name_fields.emplace_back(*kind, pair[1].get<std::string>());
        }
    }
    if (j.contains("location_text") && !j["location_text"].is_null())
        p.location_text = j["location_text"].get<std::string>();
    if (j.contains("declared_gender") && !j["declared_gender"].is_null()) {
        std::string g = j["declared_gender"].get<std::string>();
        if (g == "male") p.declared_gender = Gender::male;
        else if (g == "female") p.declared_gender = Gender::female;
        else throw DataError("line " + std::to_string(line_no) + ": declared_gender must be male or female");
    }
    if (j.contains("photo_embedding") && !j["photo_embedding"].is_null())
        p.photo_embedding = parse_embedding(j["photo_embedding"], line_no);
    if (j.contains("alt_photo_embeddings") && !j["alt_photo_embeddings"].is_null())
        for (const auto& e : j["alt_photo_embeddings"])
            p.alt_photo_embeddings.push_back(parse_embedding(e, line_no));
    if (j.contains("freetext") && !j["freetext"].is_null())
        p.freetext = j["freetext"].get<std::string>();
    if (j.contains("posts")) {
        for (const auto& jp : j["posts"]) {
            Post post;
            post.timestamp = jp.at("timestamp").get<std::int64_t>();
            if (post.timestamp < 0)
                throw DataError("line " + std::to_string(line_no) + ": negative post timestamp");
            post.text = jp.value("text", "");
            p.posts.push_back(std::move(post));
        }
    }
    std::stable_sort(p.posts.begin(), p.posts.end(),
                     [](const Post& a, const Post& b) { return a.timestamp < b.timestamp; });
    return p;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& path, const std::string& network_id) {
    Corpus corpus;
    corpus.network_id = network_id;
    std::vector<std::string> lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        json j;
        try {
            j = json::parse(lines[i]);
        } catch (const json::exception& e) {
            throw DataError(path.string() + " line " + std::to_string(i + 1) + ": " + e.what());
        }
        corpus.profiles.push_back(parse_profile(j, network_id, i + 1));
    }
    // Embedding dimension is declared by the first embedding seen.
    for (const Profile& p : corpus.profiles) {
        if (p.photo_embedding) {
            corpus.embedding_dim = p.photo_embedding->size();
            break;
        }
        if (!p.alt_photo_embeddings.empty()) {
            corpus.embedding_dim = p.alt_photo_embeddings.front().size();
            break;
        }
    }
    for (const Profile& p : corpus.profiles) {
        if (p.photo_embedding && p.photo_embedding->size() != corpus.embedding_dim)
            throw DataError("profile '" + p.profile_id + "': embedding length " +
                            std::to_string(p.photo_embedding->size()) + " != corpus dimension " +
                            std::to_string(corpus.embedding_dim));
        for (const auto& alt : p.alt_photo_embeddings)
            if (alt.size() != corpus.embedding_dim)
                throw DataError("profile '" + p.profile_id + "': alternate embedding length mismatch");
    }
    corpus.rebuild_index();
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::string out;
    for (const Profile& p : corpus.profiles) {
        json j;
        j["profile_id"] = p.profile_id;
        j["network_id"] = p.network_id;
        if (!p.name_fields.empty()) {
            json nf = json::array();
            for (const auto& [k, v] : p.name_fields)
                nf.push_back(json::array({std::string(name_field_str(k)), v}));
            j["name_fields"] = nf;
        }
        if (p.location_text) j["location_text"] = *p.location_text;
        if (p.declared_gender)
            j["declared_gender"] = *p.declared_gender == Gender::male ? "male" : "female";
        if (p.photo_embedding) j["photo_embedding"] = *p.photo_embedding;
        if (!p.alt_photo_embeddings.empty()) j["alt_photo_embeddings"] = p.alt_photo_embeddings;
        if (p.freetext) j["freetext"] = *p.freetext;
        if (!p.posts.empty()) {
            json posts = json::array();
            for (const Post& post : p.posts)
                posts.push_back({{"timestamp", post.timestamp}, {"text", post.text}});
            j["posts"] = posts;
        }
        out += j.dump();
        out += '\n';
    }
    write_text_file(path, out);
}

std::vector<PairLabel> load_labels(const std::filesystem::path& path,
                                   const Corpus& aux, const Corpus& target) {
    std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) throw DataError(path.string() + ": empty labels file (header required)");
    auto header = parse_csv_line(lines[0]);
    if (header != std::vector<std::string>{"aux_id", "target_id", "coupled"})
        throw DataError(path.string() + ": expected header aux_id,target_id,coupled");

    std::vector<PairLabel> labels;
    std::unordered_map<std::string, std::string> aux_partner, target_partner;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto fields = parse_csv_line(lines[i]);
        if (fields.size() != 3)
            throw DataError(path.string() + " line " + std::to_string(i + 1) + ": expected 3 fields");
        PairLabel label;
        label.aux_id = fields[0];
        label.target_id = fields[1];
        if (fields[2] == "true") label.coupled = true;
        else if (fields[2] == "false") label.coupled = false;
        else
            throw DataError(path.string() + " line " + std::to_string(i + 1) +
                            ": coupled must be true or false, got '" + fields[2] + "'");
        if (!aux.find(label.aux_id))
            throw DataError(path.string() + " line " + std::to_string(i + 1) +
                            ": unknown aux id '" + label.aux_id + "'");
        if (!target.find(label.target_id))
            throw DataError(path.string() + " line " + std::to_string(i + 1) +
                            ": unknown target id '" + label.target_id + "'");
        if (label.coupled) {
            auto [ai, ains] = aux_partner.emplace(label.aux_id, label.target_id);
            if (!ains && ai->second != label.target_id)
                throw DataError("profile '" + label.aux_id + "' has more than one coupled partner");
            auto [ti, tins] = target_partner.emplace(label.target_id, label.aux_id);
            if (!tins && ti->second != label.aux_id)
                throw DataError("profile '" + label.target_id + "' has more than one coupled partner");
        }
        labels.push_back(std::move(label));
    }
    return labels;
}

void save_labels(const std::vector<PairLabel>& labels, const std::filesystem::path& path) {
    std::string out = "aux_id,target_id,coupled\n";
    for (const PairLabel& l : labels) {
        out += csv_quote(l.aux_id);
        out += ',';
        out += csv_quote(l.target_id);
        out += ',';
        out += l.coupled ? "true" : "false";
        out += '\n';
    }
    write_text_file(path, out);
}

}  // namespace relink
