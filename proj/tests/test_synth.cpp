#include <doctest.h>

#include <cmath>

#include "relink/similarity.hpp"
#include "relink/synth.hpp"
#include "relink/util.hpp"
#include "test_util.hpp"

using namespace relink;

namespace {

GeneratorConfig zero_noise(std::size_t coupled, std::size_t uncoupled, std::uint64_t seed) {
    GeneratorConfig cfg;
    cfg.n_coupled = coupled;
    cfg.n_uncoupled_per_side = uncoupled;
    cfg.seed = seed;
    cfg.posts_per_profile = 8;
    cfg.embedding_dim = 8;
    return cfg;
}

Providers full_providers() {
    Providers p;
    p.gazetteer = Gazetteer::load(test::data_dir() / "gazetteer.csv");
    p.names = NameGenderTable::load(test::data_dir() / "names.csv");
    p.lexicon = SentimentLexicon::load(test::data_dir() / "lexicon_positive.txt",
                                       test::data_dir() / "lexicon_negative.txt");
    return p;
}

double mean_coupled_similarity(const SynthOutput& data, const Providers& providers,
                               const std::string& feature) {
    SimilarityEngine engine(providers, nullptr, {});
    FeatureLayout layout = FeatureLayout::build(data.aux, data.target);
    const std::size_t idx = *layout.index_of(feature);
    double total = 0.0;
    std::size_t count = 0;
    for (const PairLabel& l : data.labels) {
        if (!l.coupled) continue;
        SimilarityVector sv = compute_similarity_vector(*data.aux.find(l.aux_id),
                                                        *data.target.find(l.target_id), providers,
                                                        nullptr, {}, layout);
        if (sv.values[idx]) {
            total += *sv.values[idx];
            ++count;
        }
    }
    REQUIRE(count > 0);
    return total / double(count);
}

}  // namespace

TEST_CASE("generation is deterministic per config") {
    Providers providers = full_providers();
    VocabSpec vocab = VocabSpec::builtin();
    GeneratorConfig cfg = zero_noise(10, 5, 42);
    cfg.name_edit_rate = 0.3;
    cfg.photo_noise_sigma = 0.2;

    SynthOutput a = generate(cfg, providers.gazetteer, providers.lexicon, vocab);
    SynthOutput b = generate(cfg, providers.gazetteer, providers.lexicon, vocab);

    auto dir = test::scratch_dir("synth_det");
    save_corpus(a.aux, dir / "a_aux.jsonl");
    save_corpus(b.aux, dir / "b_aux.jsonl");
    save_corpus(a.target, dir / "a_tgt.jsonl");
    save_corpus(b.target, dir / "b_tgt.jsonl");
    CHECK(read_text_file(dir / "a_aux.jsonl") == read_text_file(dir / "b_aux.jsonl"));
    CHECK(read_text_file(dir / "a_tgt.jsonl") == read_text_file(dir / "b_tgt.jsonl"));

    // different seeds give different corpora
    cfg.seed = 43;
    SynthOutput c = generate(cfg, providers.gazetteer, providers.lexicon, vocab);
    save_corpus(c.aux, dir / "c_aux.jsonl");
    CHECK(read_text_file(dir / "a_aux.jsonl") != read_text_file(dir / "c_aux.jsonl"));
}

TEST_CASE("zero noise makes every coupled similarity 1.0") {
    Providers providers = full_providers();
    SynthOutput data =
        generate(zero_noise(12, 0, 7), providers.gazetteer, providers.lexicon, VocabSpec::builtin());

    SimilarityEngine engine(providers, nullptr, {});
    FeatureLayout layout = FeatureLayout::build(data.aux, data.target);
    CHECK(layout.combos.size() == 6);  // 2 aux name kinds x 3 target name kinds

    for (const PairLabel& l : data.labels) {
        REQUIRE(l.coupled);
        SimilarityVector sv = compute_similarity_vector(*data.aux.find(l.aux_id),
                                                        *data.target.find(l.target_id), providers,
                                                        nullptr, {}, layout);
        for (std::size_t i = 0; i < sv.values.size(); ++i) {
            if (layout.names[i] == "interest") continue;  // needs a topic model
            REQUIRE_MESSAGE(sv.values[i].has_value(), layout.names[i]);
            CHECK_MESSAGE(*sv.values[i] == doctest::Approx(1.0), layout.names[i]);
        }
    }
}

TEST_CASE("n_coupled zero gives only uncoupled labels") {
    Providers providers = full_providers();
    SynthOutput data =
        generate(zero_noise(0, 6, 3), providers.gazetteer, providers.lexicon, VocabSpec::builtin());
    CHECK(data.labels.size() == 6);
    for (const PairLabel& l : data.labels) CHECK(!l.coupled);
    CHECK(data.aux.profiles.size() == 6);
    CHECK(data.target.profiles.size() == 6);
}

TEST_CASE("coupled labels join projections of the same persona") {
    Providers providers = full_providers();
    SynthOutput data =
        generate(zero_noise(8, 4, 9), providers.gazetteer, providers.lexicon, VocabSpec::builtin());
    for (const PairLabel& l : data.labels) {
        if (!l.coupled) continue;
        // same persona index encoded in the ids
        CHECK(l.aux_id.substr(1) == l.target_id.substr(1));
        const Profile* a = data.aux.find(l.aux_id);
        const Profile* t = data.target.find(l.target_id);
        REQUIRE(a);
        REQUIRE(t);
        // zero noise: the latent attributes shine through identically
        CHECK(a->location_text == t->location_text);
        CHECK(a->declared_gender == t->declared_gender);
    }
}

TEST_CASE("raising one noise knob degrades exactly that attribute's mean similarity") {
    Providers providers = full_providers();
    VocabSpec vocab = VocabSpec::builtin();

    auto sweep = [&](const std::string& feature, auto&& set_knob) {
        double last = 2.0;
        for (double level : {0.0, 0.5, 1.0}) {
            GeneratorConfig cfg = zero_noise(200, 0, 2025);
            set_knob(cfg, level);
            SynthOutput data = generate(cfg, providers.gazetteer, providers.lexicon, vocab);
            const double mean = mean_coupled_similarity(data, providers, feature);
            CHECK_MESSAGE(mean <= last + 1e-12, feature, " at level ", level);
            last = mean;
        }
        return last;
    };

    const double name_floor = sweep("name:screen_name|username", [](GeneratorConfig& c, double x) {
        c.name_edit_rate = x;
    });
    CHECK(name_floor < 0.7);

    sweep("photo", [](GeneratorConfig& c, double x) { c.photo_noise_sigma = 0.5 * x; });
    sweep("freetext", [](GeneratorConfig& c, double x) { c.freetext_overlap = x; });
    sweep("activity", [](GeneratorConfig& c, double x) { c.activity_jitter_s = 20000.0 * x; });
    sweep("sentiment", [](GeneratorConfig& c, double x) { c.sentiment_drift = x; });
    sweep("gender", [](GeneratorConfig& c, double x) { c.gender_flip_rate = x / 2.0; });
    sweep("location", [](GeneratorConfig& c, double x) { c.location_jitter_km = 400.0 * x; });
}

TEST_CASE("missing rates drop attributes") {
    Providers providers = full_providers();
    GeneratorConfig cfg = zero_noise(100, 0, 77);
    cfg.missing_location = 1.0;
    cfg.missing_gender = 0.5;
    SynthOutput data = generate(cfg, providers.gazetteer, providers.lexicon, VocabSpec::builtin());
    std::size_t gender_present = 0;
    for (const Profile& p : data.aux.profiles) {
        CHECK(!p.location_text);
        if (p.declared_gender) ++gender_present;
    }
    CHECK(gender_present > 10);
    CHECK(gender_present < 90);
}

TEST_CASE("generator config round-trips through key=value files") {
    auto dir = test::scratch_dir("genconfig");
    GeneratorConfig cfg;
    cfg.n_coupled = 12;
    cfg.n_uncoupled_per_side = 3;
    cfg.seed = 99;
    cfg.name_edit_rate = 0.25;
    cfg.location_jitter_km = 80.0;
    std::string text;
    for (const auto& [k, v] : cfg.to_kv()) text += k + " = " + v + "\n";
    auto path = test::write_file(dir, "cfg.txt", text);
    GeneratorConfig loaded = GeneratorConfig::from_file(path);
    CHECK(loaded.n_coupled == 12);
    CHECK(loaded.seed == 99);
    CHECK(loaded.name_edit_rate == doctest::Approx(0.25));
    CHECK(loaded.location_jitter_km == doctest::Approx(80.0));

    auto bad = test::write_file(dir, "bad.txt", "name_edit_rate = 1.5\n");
    CHECK_THROWS_AS(GeneratorConfig::from_file(bad), DataError);
    auto unknown = test::write_file(dir, "unk.txt", "zzz = 1\n");
    CHECK_THROWS_AS(GeneratorConfig::from_file(unknown), DataError);
}

TEST_CASE("vocab spec parses topics, entities, and names") {
    auto dir = test::scratch_dir("vocab");
    auto path = test::write_file(dir, "v.txt",
                                 "# comment\n"
                                 "topic alpha: aa bb cc\n"
                                 "topic beta: dd ee\n"
                                 "entity Alice Smith\n"
                                 "name alex\n");
    VocabSpec spec = VocabSpec::load(path);
    REQUIRE(spec.topics.size() == 2);
    CHECK(spec.topics[0].name == "alpha");
    CHECK(spec.topics[0].words == std::vector<std::string>{"aa", "bb", "cc"});
    CHECK(spec.entities == std::vector<std::string>{"Alice Smith"});
    CHECK(spec.first_names == std::vector<std::string>{"alex"});

    auto bad = test::write_file(dir, "bad.txt", "nonsense line\n");
    CHECK_THROWS_AS(VocabSpec::load(bad), DataError);
}
