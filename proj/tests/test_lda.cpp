#include <doctest.h>

#include <cmath>

#include "relink/lda.hpp"
#include "relink/util.hpp"
#include "test_util.hpp"

using namespace relink;

namespace {

bool sums_to_one(const std::vector<double>& d) {
    double s = 0.0;
    for (double x : d) {
        if (x < 0.0) return false;
        s += x;
    }
    return std::abs(s - 1.0) <= 1e-9;
}

// two disjoint-vocabulary topics; the generator is the oracle
struct DisjointCorpus {
    std::vector<std::string> docs;
    std::vector<std::vector<double>> true_rows;  // 2 x V over the merged vocabulary
    std::vector<std::string> vocab;              // merged, in row order
};

DisjointCorpus make_disjoint_corpus(std::size_t n_docs, std::uint64_t seed) {
    const std::vector<std::string> words_a = {"apple", "pear",  "plum",  "grape",
                                              "melon", "peach", "mango", "cherry"};
    const std::vector<std::string> words_b = {"bolt", "gear",  "lathe", "rivet",
                                              "weld", "crank", "shaft", "piston"};
    DisjointCorpus c;
    DetRng rng(seed);
    for (std::size_t d = 0; d < n_docs; ++d) {
        const auto& words = d % 2 == 0 ? words_a : words_b;
        std::string doc;
        for (int i = 0; i < 12; ++i) {
            if (!doc.empty()) doc += ' ';
            doc += words[rng.next_below(words.size())];
        }
        c.docs.push_back(std::move(doc));
    }
    for (const std::string& w : words_a) c.vocab.push_back(w);
    for (const std::string& w : words_b) c.vocab.push_back(w);
    c.true_rows = {std::vector<double>(16, 0.0), std::vector<double>(16, 0.0)};
    for (std::size_t i = 0; i < 8; ++i) c.true_rows[0][i] = 1.0 / 8.0;
    for (std::size_t i = 8; i < 16; ++i) c.true_rows[1][i] = 1.0 / 8.0;
    return c;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

TEST_CASE("single-word vocabulary forces degenerate rows") {
    LdaModel m = fit_lda({"xx xx xx"}, 2, 0.5, 0.01, 20, 42);
    REQUIRE(m.topic_word.size() == 2);
    REQUIRE(m.vocabulary.size() == 1);
    CHECK(m.topic_word[0][0] == doctest::Approx(1.0));
    CHECK(m.topic_word[1][0] == doctest::Approx(1.0));
}

TEST_CASE("fit_lda validates inputs") {
    CHECK_THROWS_AS(fit_lda({"alpha beta"}, 1, 0.5, 0.01, 10, 1), DataError);
    CHECK_THROWS_AS(fit_lda({"a", ""}, 2, 0.5, 0.01, 10, 1), DataError);  // tokens too short
}

TEST_CASE("fixed seed gives bit-identical models") {
    auto corpus = make_disjoint_corpus(40, 9).docs;
    LdaModel m1 = fit_lda(corpus, 3, 0.5, 0.01, 50, 1234);
    LdaModel m2 = fit_lda(corpus, 3, 0.5, 0.01, 50, 1234);
    CHECK(m1.vocabulary == m2.vocabulary);
    REQUIRE(m1.topic_word.size() == m2.topic_word.size());
    for (std::size_t k = 0; k < m1.topic_word.size(); ++k)
        CHECK(m1.topic_word[k] == m2.topic_word[k]);  // exact double equality
    CHECK(m1.content_hash() == m2.content_hash());

    // inference determinism across the fit/infer boundary
    CHECK(infer_topics(m1, corpus[0]) == infer_topics(m2, corpus[0]));
}

TEST_CASE("topic rows are distributions") {
    auto corpus = make_disjoint_corpus(60, 5).docs;
    LdaModel m = fit_lda(corpus, 4, 0.5, 0.01, 80, 7);
    for (const auto& row : m.topic_word) CHECK(sums_to_one(row));
}

TEST_CASE("disjoint-vocabulary recovery reaches cosine 0.9") {
    DisjointCorpus c = make_disjoint_corpus(200, 11);
    LdaModel m = fit_lda(c.docs, 2, 0.5, 0.01, 300, 31);

    // align recovered rows to true rows over the merged vocabulary
    std::vector<std::vector<double>> recovered(2, std::vector<double>(c.vocab.size(), 0.0));
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t i = 0; i < c.vocab.size(); ++i) {
            auto it = m.vocabulary.find(c.vocab[i]);
            if (it != m.vocabulary.end()) recovered[k][i] = m.topic_word[k][it->second];
        }
    // greedy alignment
    double c00 = cosine(recovered[0], c.true_rows[0]);
    double c01 = cosine(recovered[0], c.true_rows[1]);
    double mean;
    if (c00 >= c01)
        mean = (c00 + cosine(recovered[1], c.true_rows[1])) / 2.0;
    else
        mean = (c01 + cosine(recovered[1], c.true_rows[0])) / 2.0;
    CHECK(mean >= 0.9);
}

TEST_CASE("infer_topics: empty and unseen documents are uniform") {
    auto corpus = make_disjoint_corpus(40, 3).docs;
    LdaModel m = fit_lda(corpus, 4, 0.5, 0.01, 50, 2);

    auto uniform = infer_topics(m, "");
    for (double x : uniform) CHECK(x == doctest::Approx(0.25));
    auto unseen = infer_topics(m, "zzzz qqqq");
    for (double x : unseen) CHECK(x == doctest::Approx(0.25));
}

TEST_CASE("infer_topics concentrates on the generating topic") {
    DisjointCorpus c = make_disjoint_corpus(200, 17);
    LdaModel m = fit_lda(c.docs, 2, 0.5, 0.01, 300, 23);

    auto da = infer_topics(m, "apple pear plum grape melon peach");
    auto db = infer_topics(m, "bolt gear lathe rivet weld crank");
    CHECK(sums_to_one(da));
    CHECK(sums_to_one(db));
    // each sits mostly on its own (different) topic
    std::size_t ka = da[0] > da[1] ? 0 : 1;
    std::size_t kb = db[0] > db[1] ? 0 : 1;
    CHECK(ka != kb);
    CHECK(da[ka] >= 0.8);
    CHECK(db[kb] >= 0.8);
}

TEST_CASE("profile topic distribution is the mean over posts") {
    auto corpus = make_disjoint_corpus(60, 29).docs;
    LdaModel m = fit_lda(corpus, 3, 0.5, 0.01, 60, 4);

    std::vector<Post> none;
    auto d0 = profile_topic_distribution(m, none);
    for (double x : d0) CHECK(x == doctest::Approx(1.0 / 3.0));

    std::vector<Post> one = {{0, corpus[0]}};
    CHECK(profile_topic_distribution(m, one) == infer_topics(m, corpus[0]));

    std::vector<Post> two = {{0, corpus[0]}, {1, corpus[1]}};
    auto p = infer_topics(m, corpus[0]);
    auto q = infer_topics(m, corpus[1]);
    auto mean = profile_topic_distribution(m, two);
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(mean[k] == doctest::Approx((p[k] + q[k]) / 2.0).epsilon(1e-12));
    CHECK(sums_to_one(mean));
}

TEST_CASE("lda model round-trips through json") {
    auto dir = test::scratch_dir("lda_json");
    auto corpus = make_disjoint_corpus(30, 77).docs;
    LdaModel m = fit_lda(corpus, 2, 0.5, 0.01, 30, 5);
    save_lda(m, dir / "lda.json");
    LdaModel m2 = load_lda(dir / "lda.json");
    CHECK(m2.theta == m.theta);
    CHECK(m2.vocabulary == m.vocabulary);
    CHECK(m2.topic_word == m.topic_word);
    CHECK(m2.seed == m.seed);
    CHECK(infer_topics(m, "apple pear") == infer_topics(m2, "apple pear"));
}
