#include "relink/lda.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "relink/util.hpp"

namespace relink {

using json = nlohmann::json;

namespace {

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words = {
        "the", "and", "for", "are", "but", "not", "you", "all", "can", "her", "was", "one",
        "our", "out", "day", "get", "has", "him", "his", "how", "man", "new", "now", "old",
        "see", "two", "way", "who", "its", "did", "yes", "your", "with", "this", "that",
        "from", "they", "will", "have", "what", "when", "where", "which", "their", "there",
        "about", "would", "these", "other", "into", "more", "some", "them", "then", "than",
        "been", "were", "also", "just", "over", "such", "only", "very", "because", "while",
        "after", "before", "under", "again", "each", "most", "here"};
    return words;
}

}  // namespace

std::vector<std::string> lda_tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 2 && !stopwords().count(cur)) tokens.push_back(cur);
        cur.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            cur.push_back(char(std::tolower(static_cast<unsigned char>(c))));
        else
            flush();
    }
    flush();
    return tokens;
}

std::uint64_t LdaModel::content_hash() const {
    std::uint64_t h = fnv1a64("lda");
    h = fnv1a64_mix(h, theta);
    h = fnv1a64_mix(h, seed);
    for (const auto& [tok, idx] : vocabulary) h = fnv1a64(tok, fnv1a64_mix(h, idx));
    for (const auto& row : topic_word)
        for (double p : row) {
            std::uint64_t bits;
            static_assert(sizeof(bits) == sizeof(p));
            std::memcpy(&bits, &p, sizeof(bits));
            h = fnv1a64_mix(h, bits);
        }
    return h;
}

LdaModel fit_lda(const std::vector<std::string>& corpus_texts, std::size_t theta, double alpha,
                 double beta, std::size_t iterations, std::uint64_t seed) {
    if (theta < 2) throw DataError("fit_lda: theta must be at least 2");

    std::vector<std::vector<std::size_t>> docs;  // token ids per document
    std::map<std::string, std::size_t> vocab;
    for (const std::string& text : corpus_texts) {
        std::vector<std::size_t> ids;
        for (const std::string& tok : lda_tokenize(text)) {
            auto [it, inserted] = vocab.emplace(tok, vocab.size());
            ids.push_back(it->second);
        }
        if (!ids.empty()) docs.push_back(std::move(ids));
    }
    if (docs.empty()) throw DataError("fit_lda: no nonempty documents after tokenization");

    const std::size_t v = vocab.size();
    std::vector<std::vector<std::size_t>> assignments(docs.size());
    std::vector<std::uint32_t> doc_topic(docs.size() * theta, 0);
    std::vector<std::uint32_t> topic_word_counts(theta * v, 0);
    std::vector<std::uint32_t> topic_totals(theta, 0);

    DetRng rng(seed);
    for (std::size_t d = 0; d < docs.size(); ++d) {
        assignments[d].resize(docs[d].size());
        for (std::size_t n = 0; n < docs[d].size(); ++n) {
            std::size_t k = std::size_t(rng.next_below(theta));
            assignments[d][n] = k;
            ++doc_topic[d * theta + k];
            ++topic_word_counts[k * v + docs[d][n]];
            ++topic_totals[k];
        }
    }

    std::vector<double> probs(theta);
    const double vbeta = double(v) * beta;
    for (std::size_t sweep = 0; sweep < iterations; ++sweep) {
        for (std::size_t d = 0; d < docs.size(); ++d) {
            for (std::size_t n = 0; n < docs[d].size(); ++n) {
                const std::size_t w = docs[d][n];
                const std::size_t old_k = assignments[d][n];
                --doc_topic[d * theta + old_k];
                --topic_word_counts[old_k * v + w];
                --topic_totals[old_k];

                double total = 0.0;
                for (std::size_t k = 0; k < theta; ++k) {
                    double p = (double(doc_topic[d * theta + k]) + alpha) *
                               (double(topic_word_counts[k * v + w]) + beta) /
                               (double(topic_totals[k]) + vbeta);
                    probs[k] = p;
                    total += p;
                }
                double u = rng.next_double() * total;
                std::size_t new_k = theta - 1;
                double acc = 0.0;
                for (std::size_t k = 0; k < theta; ++k) {
                    acc += probs[k];
                    if (u < acc) {
                        new_k = k;
                        break;
                    }
                }
                assignments[d][n] = new_k;
                ++doc_topic[d * theta + new_k];
                ++topic_word_counts[new_k * v + w];
                ++topic_totals[new_k];
            }
        }
    }

    LdaModel model;
    model.theta = theta;
    model.alpha = alpha;
    model.beta = beta;
    model.seed = seed;
    model.iterations = iterations;
    model.vocabulary = std::move(vocab);
    model.topic_word.assign(theta, std::vector<double>(v, 0.0));
    for (std::size_t k = 0; k < theta; ++k) {
        const double denom = double(topic_totals[k]) + vbeta;
        for (std::size_t w = 0; w < v; ++w)
            model.topic_word[k][w] = (double(topic_word_counts[k * v + w]) + beta) / denom;
    }
    return model;
}

std::vector<double> infer_topics(const LdaModel& model, std::string_view document) {
    const std::size_t theta = model.theta;
    std::vector<double> dist(theta, 1.0 / double(theta));

    std::vector<std::size_t> ids;
    for (const std::string& tok : lda_tokenize(document)) {
        auto it = model.vocabulary.find(tok);
        if (it != model.vocabulary.end()) ids.push_back(it->second);
    }
    if (ids.empty()) return dist;

    constexpr std::size_t kFoldInSweeps = 50;
    DetRng rng(fnv1a64_mix(model.seed, fnv1a64(document)));

    std::vector<std::size_t> assignment(ids.size());
    std::vector<std::uint32_t> counts(theta, 0);
    for (std::size_t n = 0; n < ids.size(); ++n) {
        std::size_t k = std::size_t(rng.next_below(theta));
        assignment[n] = k;
        ++counts[k];
    }
    std::vector<double> probs(theta);
    for (std::size_t sweep = 0; sweep < kFoldInSweeps; ++sweep) {
        for (std::size_t n = 0; n < ids.size(); ++n) {
            const std::size_t w = ids[n];
            --counts[assignment[n]];
            double total = 0.0;
            for (std::size_t k = 0; k < theta; ++k) {
                double p = (double(counts[k]) + model.alpha) * model.topic_word[k][w];
                probs[k] = p;
                total += p;
            }
            double u = rng.next_double() * total;
            std::size_t new_k = theta - 1;
            double acc = 0.0;
            for (std::size_t k = 0; k < theta; ++k) {
                acc += probs[k];
                if (u < acc) {
                    new_k = k;
                    break;
                }
            }
            assignment[n] = new_k;
            ++counts[new_k];
        }
    }

    const double denom = double(ids.size()) + double(theta) * model.alpha;
    double sum = 0.0;
    for (std::size_t k = 0; k < theta; ++k) {
        dist[k] = (double(counts[k]) + model.alpha) / denom;
        sum += dist[k];
    }
    for (double& p : dist) p /= sum;
    return dist;
}

std::vector<double> profile_topic_distribution(const LdaModel& model, std::span<const Post> posts) {
    std::vector<double> mean(model.theta, 1.0 / double(model.theta));
    if (posts.empty()) return mean;
    std::fill(mean.begin(), mean.end(), 0.0);
    for (const Post& post : posts) {
        std::vector<double> d = infer_topics(model, post.text);
        for (std::size_t k = 0; k < model.theta; ++k) mean[k] += d[k];
    }
    for (double& p : mean) p /= double(posts.size());
    return mean;
}

void save_lda(const LdaModel& model, const std::filesystem::path& path) {
    json j;
    j["theta"] = model.theta;
    j["alpha"] = model.alpha;
    j["beta"] = model.beta;
    j["seed"] = model.seed;
    j["iterations"] = model.iterations;
    json vocab = json::object();
    for (const auto& [tok, idx] : model.vocabulary) vocab[tok] = idx;
    j["vocabulary"] = vocab;
    j["topic_word"] = model.topic_word;
    write_text_file(path, j.dump() + "\n");
}

LdaModel load_lda(const std::filesystem::path& path) {
    json j = json::parse(read_text_file(path));
    LdaModel model;
    model.theta = j.at("theta").get<std::size_t>();
    model.alpha = j.at("alpha").get<double>();
    model.beta = j.at("beta").get<double>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.iterations = j.at("iterations").get<std::size_t>();
    for (const auto& [tok, idx] : j.at("vocabulary").items())
        model.vocabulary[tok] = idx.get<std::size_t>();
    model.topic_word = j.at("topic_word").get<std::vector<std::vector<double>>>();
    if (model.topic_word.size() != model.theta)
        throw DataError("lda model: topic_word row count != theta");
    return model;
}

}  // namespace relink
