#include "relink/synth.hpp"

#include <algorithm>
#include <cmath>

#include "relink/similarity.hpp"
#include "relink/util.hpp"

namespace relink {

namespace {

// purpose tags for per-persona random streams
enum class Stream : std::uint64_t {
    base_name = 1,
    name_edit_aux,
    name_edit_target,
    location_pick,
    location_jitter_aux,
    location_jitter_target,
    gender_pick,
    gender_flip_aux,
    gender_flip_target,
    photo_latent,
    photo_noise_aux,
    photo_noise_target,
    photo_alt,
    freetext_pick,
    freetext_replace,
    posts_latent,
    posts_drift,
    posts_jitter,
    sentiment_mood,
    sentiment_drift,
    missing_aux,
    missing_target,
};

DetRng stream(std::uint64_t seed, std::size_t persona, Stream purpose) {
    return DetRng(fnv1a64_mix(fnv1a64_mix(seed, persona), std::uint64_t(purpose)));
}

constexpr std::int64_t kEpochDay = 19000;   // generation window start, days since epoch
constexpr std::size_t kWindowDays = 60;     // posts spread over this many days

struct Persona {
    std::string base_name;
    std::string location_key;
    Coord location_coord;
    Gender gender = Gender::male;
    std::vector<double> photo;                      // unit vector
    std::vector<std::vector<double>> photo_alts;    // other photos of the same person
    std::vector<std::string> entities;              // freetext entity pool, distinct
    std::size_t topic_a = 0, topic_b = 0;           // mixture components
    double topic_lambda = 0.75;
    std::vector<Post> posts;                        // latent posts, sorted
    std::vector<double> moods;                      // per window day, P(positive word)
};

class Generator {
public:
    Generator(const GeneratorConfig& cfg, const Gazetteer& gaz, const SentimentLexicon& lex,
              const VocabSpec& vocab)
        : cfg_(cfg), vocab_(vocab) {
        cfg_.validate();
        if (gaz.empty()) throw DataError("generate: gazetteer must be nonempty");
        if (vocab.topics.size() < 2) throw DataError("generate: vocab spec needs >= 2 topics");
        if (vocab.entities.size() < 8) throw DataError("generate: vocab spec needs >= 8 entities");
        if (vocab.first_names.empty()) throw DataError("generate: vocab spec needs name pool");
        for (const auto& [place, coord] : gaz.entries())
            if (place.find(',') != std::string::npos) {
                city_keys_.push_back(place);
                city_coords_.push_back(coord);
            }
        if (city_keys_.empty())
            throw DataError("generate: gazetteer has no 'city, country' entries");
        positive_words_ = lex.positive_tokens();
        negative_words_ = lex.negative_tokens();
        if (positive_words_.empty() || negative_words_.empty())
            throw DataError("generate: sentiment lexicon must be nonempty on both sides");
    }

    SynthOutput run() {
        SynthOutput out;
        out.aux.network_id = "aux";
        out.target.network_id = "target";
        out.aux.embedding_dim = cfg_.embedding_dim;
        out.target.embedding_dim = cfg_.embedding_dim;

        const std::size_t n = cfg_.n_coupled, u = cfg_.n_uncoupled_per_side;
        for (std::size_t i = 0; i < n; ++i) {
            Persona p = make_persona(i);
            out.aux.profiles.push_back(project(p, i, /*aux=*/true));
            out.target.profiles.push_back(project(p, i, /*aux=*/false));
            out.labels.push_back({out.aux.profiles.back().profile_id,
                                  out.target.profiles.back().profile_id, true});
        }
        for (std::size_t i = 0; i < u; ++i) {
            Persona pa = make_persona(n + i);
            out.aux.profiles.push_back(project(pa, n + i, true));
            Persona pt = make_persona(n + u + i);
            out.target.profiles.push_back(project(pt, n + u + i, false));
            out.labels.push_back({out.aux.profiles[n + i].profile_id,
                                  out.target.profiles[n + i].profile_id, false});
        }
        out.aux.rebuild_index();
        out.target.rebuild_index();
        return out;
    }

private:
    Persona make_persona(std::size_t idx) {
        Persona p;
        {
            auto rng = stream(cfg_.seed, idx, Stream::base_name);
            p.base_name = vocab_.first_names[rng.next_below(vocab_.first_names.size())] +
                          std::to_string(10 + rng.next_below(90));
        }
        {
            auto rng = stream(cfg_.seed, idx, Stream::location_pick);
            const std::size_t k = rng.next_below(city_keys_.size());
            p.location_key = city_keys_[k];
            p.location_coord = city_coords_[k];
        }
        {
            auto rng = stream(cfg_.seed, idx, Stream::gender_pick);
            p.gender = rng.next_below(2) == 0 ? Gender::male : Gender::female;
        }
        {
            auto rng = stream(cfg_.seed, idx, Stream::photo_latent);
            p.photo = unit_vector(rng);
            auto alt_rng = stream(cfg_.seed, idx, Stream::photo_alt);
            for (double scale : {0.6, 1.2}) {
                std::vector<double> alt = p.photo;
                for (double& x : alt) x += scale * alt_rng.next_gaussian() / std::sqrt(double(alt.size()));
                p.photo_alts.push_back(std::move(alt));
            }
        }
        {
            auto rng = stream(cfg_.seed, idx, Stream::freetext_pick);
            const std::size_t want = 3 + rng.next_below(3);
            while (p.entities.size() < want) {
                const std::string& e = vocab_.entities[rng.next_below(vocab_.entities.size())];
                if (std::find(p.entities.begin(), p.entities.end(), e) == p.entities.end())
                    p.entities.push_back(e);
            }
        }
        {
            auto rng = stream(cfg_.seed, idx, Stream::posts_latent);
            p.topic_a = rng.next_below(vocab_.topics.size());
            p.topic_b = rng.next_below(vocab_.topics.size());
            if (p.topic_b == p.topic_a) p.topic_b = (p.topic_a + 1) % vocab_.topics.size();
            p.topic_lambda = 0.6 + 0.3 * rng.next_double();

            auto mood_rng = stream(cfg_.seed, idx, Stream::sentiment_mood);
            p.moods.resize(kWindowDays);
            for (double& m : p.moods) m = 0.15 + 0.7 * mood_rng.next_double();

            for (std::size_t k = 0; k < cfg_.posts_per_profile; ++k) {
                Post post;
                const std::size_t day = rng.next_below(kWindowDays);
                post.timestamp = (kEpochDay + std::int64_t(day)) * 86400 +
                                 std::int64_t(rng.next_below(86400));
                const std::size_t topic =
                    rng.next_double() < p.topic_lambda ? p.topic_a : p.topic_b;
                post.text = topic_sentence(rng, topic);
                post.text += sentiment_words(rng, p.moods[day]);
                p.posts.push_back(std::move(post));
            }
            std::stable_sort(p.posts.begin(), p.posts.end(),
                             [](const Post& a, const Post& b) { return a.timestamp < b.timestamp; });
        }
        return p;
    }

    std::vector<double> unit_vector(DetRng& rng) {
        std::vector<double> v(cfg_.embedding_dim);
        double norm2 = 0.0;
        for (double& x : v) {
            x = rng.next_gaussian();
            norm2 += x * x;
        }
        const double norm = std::sqrt(std::max(norm2, 1e-12));
        for (double& x : v) x /= norm;
        return v;
    }

    std::string topic_sentence(DetRng& rng, std::size_t topic) {
        const auto& words = vocab_.topics[topic].words;
        const std::size_t count = 6 + rng.next_below(4);
        std::string text;
        for (std::size_t i = 0; i < count; ++i) {
            if (!text.empty()) text += ' ';
            text += words[rng.next_below(words.size())];
        }
        return text;
    }

    std::string sentiment_words(DetRng& rng, double mood) {
        std::string text;
        for (int i = 0; i < 2; ++i) {
            const bool positive = rng.next_double() < mood;
            const auto& pool = positive ? positive_words_ : negative_words_;
            text += ' ';
            text += pool[rng.next_below(pool.size())];
        }
        return text;
    }

    std::string edited_name(const std::string& base, DetRng& rng, double rate) {
        // pre-drawn substitution positions and letters; the knob only selects
        // how many apply, keeping draws aligned across noise levels
        std::vector<std::size_t> positions(base.size());
        for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
        rng.shuffle(positions);
        std::vector<char> letters(base.size());
        for (char& c : letters) c = char('a' + rng.next_below(26));
        std::string name = base;
        const std::size_t edits =
            std::min(base.size(), std::size_t(std::llround(rate * double(base.size()))));
        for (std::size_t i = 0; i < edits; ++i) {
            char repl = letters[i];
            if (repl == name[positions[i]]) repl = repl == 'z' ? 'a' : char(repl + 1);
            name[positions[i]] = repl;
        }
        return name;
    }

    std::string jittered_location(const Persona& p, DetRng& rng) {
        const double dist_km = std::abs(rng.next_gaussian()) * cfg_.location_jitter_km;
        const double bearing = rng.next_double() * 6.283185307179586;
        if (dist_km == 0.0) return p.location_key;
        const double dlat = dist_km * std::cos(bearing) / 111.32;
        const double coslat = std::cos(p.location_coord.lat * 0.017453292519943295);
        const double dlon =
            dist_km * std::sin(bearing) / (111.32 * std::max(0.2, std::abs(coslat)));
        const double lat = std::clamp(p.location_coord.lat + dlat, -89.9, 89.9);
        const double lon = p.location_coord.lon + dlon;
        // snap to the nearest gazetteer city
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < city_keys_.size(); ++i) {
            const double d = haversine_km(lat, lon, city_coords_[i].lat, city_coords_[i].lon);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return city_keys_[best];
    }

    Profile project(const Persona& p, std::size_t idx, bool aux) {
        Profile prof;
        prof.profile_id = (aux ? "a" : "t") + std::to_string(idx);
        prof.network_id = aux ? "aux" : "target";

        auto name_rng =
            stream(cfg_.seed, idx, aux ? Stream::name_edit_aux : Stream::name_edit_target);
        if (aux) {
            prof.name_fields.emplace_back(NameField::screen_name,
                                          edited_name(p.base_name, name_rng, cfg_.name_edit_rate));
            prof.name_fields.emplace_back(NameField::display_name,
                                          edited_name(p.base_name, name_rng, cfg_.name_edit_rate));
        } else {
            prof.name_fields.emplace_back(NameField::given_name,
                                          edited_name(p.base_name, name_rng, cfg_.name_edit_rate));
            prof.name_fields.emplace_back(NameField::last_name,
                                          edited_name(p.base_name, name_rng, cfg_.name_edit_rate));
            prof.name_fields.emplace_back(NameField::username,
                                          edited_name(p.base_name, name_rng, cfg_.name_edit_rate));
        }

        {
            auto rng = stream(cfg_.seed, idx,
                              aux ? Stream::location_jitter_aux : Stream::location_jitter_target);
            prof.location_text = jittered_location(p, rng);
        }
        {
            auto rng =
                stream(cfg_.seed, idx, aux ? Stream::gender_flip_aux : Stream::gender_flip_target);
            Gender g = p.gender;
            if (rng.next_double() < cfg_.gender_flip_rate)
                g = g == Gender::male ? Gender::female : Gender::male;
            prof.declared_gender = g;
        }
        {
            auto rng =
                stream(cfg_.seed, idx, aux ? Stream::photo_noise_aux : Stream::photo_noise_target);
            std::vector<double> photo = p.photo;
            for (double& x : photo) x += cfg_.photo_noise_sigma * rng.next_gaussian();
            prof.photo_embedding = std::move(photo);
            if (!aux) prof.alt_photo_embeddings = p.photo_alts;
        }
        {
            std::vector<std::string> entities = p.entities;
            if (!aux) {
                auto rng = stream(cfg_.seed, idx, Stream::freetext_replace);
                std::vector<std::size_t> order(entities.size());
                for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
                rng.shuffle(order);
                const std::size_t replaced = std::size_t(
                    std::llround(cfg_.freetext_overlap * double(entities.size())));
                for (std::size_t i = 0; i < std::min(replaced, entities.size()); ++i) {
                    std::string fresh;
                    do {
                        fresh = vocab_.entities[rng.next_below(vocab_.entities.size())];
                    } while (std::find(p.entities.begin(), p.entities.end(), fresh) !=
                             p.entities.end());
                    entities[order[i]] = fresh;
                }
            }
            std::map<std::string, int> multiset;
            for (const std::string& e : entities) multiset[normalize_key(e)] += 1;
            prof.freetext = render_entities(multiset);
        }
        {
            prof.posts = p.posts;
            if (!aux) {
                auto drift_rng = stream(cfg_.seed, idx, Stream::posts_drift);
                auto jitter_rng = stream(cfg_.seed, idx, Stream::posts_jitter);
                auto sent_rng = stream(cfg_.seed, idx, Stream::sentiment_drift);
                const std::size_t fresh_topic = drift_rng.next_below(vocab_.topics.size());
                for (Post& post : prof.posts) {
                    const std::size_t day =
                        std::size_t(std::clamp<std::int64_t>(post.timestamp / 86400 - kEpochDay, 0,
                                                             std::int64_t(kWindowDays) - 1));
                    // draws happen unconditionally so knobs stay independent
                    const bool resample = drift_rng.next_double() < cfg_.topic_drift;
                    std::string drift_text = topic_sentence(drift_rng, fresh_topic);
                    const bool flip = sent_rng.next_double() < cfg_.sentiment_drift;
                    const double mood = p.moods[day];
                    std::string sent_text = sentiment_words(sent_rng, flip ? 1.0 - mood : mood);
                    if (resample) post.text = drift_text + sent_text;
                    else if (flip) {
                        // keep the topic part, swap the sentiment tail
                        post.text = strip_sentiment_tail(post.text) + sent_text;
                    }
                    const double jitter = jitter_rng.next_gaussian() * cfg_.activity_jitter_s;
                    post.timestamp =
                        std::max<std::int64_t>(0, post.timestamp + std::int64_t(std::llround(jitter)));
                }
                std::stable_sort(prof.posts.begin(), prof.posts.end(),
                                 [](const Post& a, const Post& b) { return a.timestamp < b.timestamp; });
            }
        }
        {
            auto rng =
                stream(cfg_.seed, idx, aux ? Stream::missing_aux : Stream::missing_target);
            // fixed draw order per attribute
            const double u_loc = rng.next_double();
            const double u_gen = rng.next_double();
            const double u_pho = rng.next_double();
            const double u_txt = rng.next_double();
            const double u_post = rng.next_double();
            if (u_loc < cfg_.missing_location) prof.location_text.reset();
            if (u_gen < cfg_.missing_gender) prof.declared_gender.reset();
            if (u_pho < cfg_.missing_photo) prof.photo_embedding.reset();
            if (u_txt < cfg_.missing_freetext) prof.freetext.reset();
            if (u_post < cfg_.missing_posts) prof.posts.clear();
        }
        return prof;
    }

    // latent post text layout: topic words, then a two-word sentiment tail
    static std::string strip_sentiment_tail(const std::string& text) {
        std::size_t cut = text.size();
        for (int i = 0; i < 2; ++i) {
            auto sp = text.rfind(' ', cut == 0 ? std::string::npos : cut - 1);
            if (sp == std::string::npos) return "";
            cut = sp;
        }
        return text.substr(0, cut);
    }

    GeneratorConfig cfg_;
    const VocabSpec& vocab_;
    std::vector<std::string> city_keys_;
    std::vector<Coord> city_coords_;
    std::vector<std::string> positive_words_;
    std::vector<std::string> negative_words_;
};

}  // namespace

void GeneratorConfig::validate() const {
    auto rate = [](double x, const char* name) {
        if (x < 0.0 || x > 1.0)
            throw DataError(std::string("generator config: ") + name + " must be in [0,1]");
    };
    rate(name_edit_rate, "name_edit_rate");
    rate(gender_flip_rate, "gender_flip_rate");
    rate(freetext_overlap, "freetext_overlap");
    rate(topic_drift, "topic_drift");
    rate(sentiment_drift, "sentiment_drift");
    rate(missing_location, "missing_location");
    rate(missing_gender, "missing_gender");
    rate(missing_photo, "missing_photo");
    rate(missing_freetext, "missing_freetext");
    rate(missing_posts, "missing_posts");
    if (location_jitter_km < 0.0 || photo_noise_sigma < 0.0 || activity_jitter_s < 0.0)
        throw DataError("generator config: scale knobs must be nonnegative");
    if (embedding_dim == 0) throw DataError("generator config: embedding_dim must be positive");
}

SynthOutput generate(const GeneratorConfig& config, const Gazetteer& gaz,
                     const SentimentLexicon& lexicon, const VocabSpec& vocab) {
    Generator g(config, gaz, lexicon, vocab);
    return g.run();
}

GeneratorConfig GeneratorConfig::from_kv(
    const std::vector<std::pair<std::string, std::string>>& kv) {
    GeneratorConfig cfg;
    for (const auto& [key, value] : kv) {
        try {
            if (key == "n_coupled") cfg.n_coupled = std::stoull(value);
            else if (key == "n_uncoupled_per_side") cfg.n_uncoupled_per_side = std::stoull(value);
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "name_edit_rate") cfg.name_edit_rate = std::stod(value);
            else if (key == "gender_flip_rate") cfg.gender_flip_rate = std::stod(value);
            else if (key == "freetext_overlap") cfg.freetext_overlap = std::stod(value);
            else if (key == "topic_drift") cfg.topic_drift = std::stod(value);
            else if (key == "sentiment_drift") cfg.sentiment_drift = std::stod(value);
            else if (key == "location_jitter_km") cfg.location_jitter_km = std::stod(value);
            else if (key == "photo_noise_sigma") cfg.photo_noise_sigma = std::stod(value);
            else if (key == "activity_jitter_s") cfg.activity_jitter_s = std::stod(value);
            else if (key == "missing_location") cfg.missing_location = std::stod(value);
            else if (key == "missing_gender") cfg.missing_gender = std::stod(value);
            else if (key == "missing_photo") cfg.missing_photo = std::stod(value);
            else if (key == "missing_freetext") cfg.missing_freetext = std::stod(value);
            else if (key == "missing_posts") cfg.missing_posts = std::stod(value);
            else if (key == "posts_per_profile") cfg.posts_per_profile = std::stoull(value);
            else if (key == "embedding_dim") cfg.embedding_dim = std::stoull(value);
            else throw DataError("generator config: unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw DataError("generator config: malformed value for '" + key + "'");
        } catch (const std::out_of_range&) {
            throw DataError("generator config: value out of range for '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

GeneratorConfig GeneratorConfig::from_file(const std::filesystem::path& path) {
    std::vector<std::pair<std::string, std::string>> kv;
    for (const std::string& raw : read_lines(path)) {
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError(path.string() + ": expected key=value, got '" + line + "'");
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return from_kv(kv);
}

std::vector<std::pair<std::string, std::string>> GeneratorConfig::to_kv() const {
    return {
        {"n_coupled", std::to_string(n_coupled)},
        {"n_uncoupled_per_side", std::to_string(n_uncoupled_per_side)},
        {"seed", std::to_string(seed)},
        {"name_edit_rate", fmt_double(name_edit_rate)},
        {"gender_flip_rate", fmt_double(gender_flip_rate)},
        {"freetext_overlap", fmt_double(freetext_overlap)},
        {"topic_drift", fmt_double(topic_drift)},
        {"sentiment_drift", fmt_double(sentiment_drift)},
        {"location_jitter_km", fmt_double(location_jitter_km)},
        {"photo_noise_sigma", fmt_double(photo_noise_sigma)},
        {"activity_jitter_s", fmt_double(activity_jitter_s)},
        {"missing_location", fmt_double(missing_location)},
        {"missing_gender", fmt_double(missing_gender)},
        {"missing_photo", fmt_double(missing_photo)},
        {"missing_freetext", fmt_double(missing_freetext)},
        {"missing_posts", fmt_double(missing_posts)},
        {"posts_per_profile", std::to_string(posts_per_profile)},
        {"embedding_dim", std::to_string(embedding_dim)},
    };
}

VocabSpec VocabSpec::load(const std::filesystem::path& path) {
    VocabSpec spec;
    auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string line = trim(lines[i]);
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("topic ", 0) == 0) {
            auto colon = line.find(':');
            if (colon == std::string::npos)
                throw DataError(path.string() + " line " + std::to_string(i + 1) +
                                ": topic line needs 'topic <name>: <words>'");
            Topic t;
            t.name = trim(line.substr(6, colon - 6));
            t.words = split_ws(line.substr(colon + 1));
            if (t.name.empty() || t.words.empty())
                throw DataError(path.string() + " line " + std::to_string(i + 1) +
                                ": empty topic name or word list");
            spec.topics.push_back(std::move(t));
        } else if (line.rfind("entity ", 0) == 0) {
            spec.entities.push_back(trim(line.substr(7)));
        } else if (line.rfind("name ", 0) == 0) {
            spec.first_names.push_back(normalize_key(line.substr(5)));
        } else {
            throw DataError(path.string() + " line " + std::to_string(i + 1) +
                            ": expected topic/entity/name line");
        }
    }
    return spec;
}

VocabSpec VocabSpec::builtin() {
    VocabSpec spec;
    spec.topics = {
        {"sports", {"match", "goal", "league", "striker", "keeper", "tackle", "stadium",
                    "referee", "corner", "penalty", "fixture", "transfer"}},
        {"cooking", {"recipe", "saute", "garlic", "simmer", "oven", "dough", "spice",
                     "braise", "skillet", "marinade", "broth", "whisk"}},
        {"music", {"chord", "melody", "vinyl", "concert", "bassline", "drummer", "encore",
                   "acoustic", "playlist", "tempo", "lyric", "studio"}},
        {"hiking", {"trail", "summit", "ridge", "compass", "campsite", "scramble", "valley",
                    "glacier", "switchback", "peak", "creek", "thru"}},
        {"coding", {"compiler", "lambda", "refactor", "segfault", "pointer", "thread",
                    "commit", "debugger", "kernel", "syntax", "runtime", "backend"}},
        {"gardening", {"seedling", "compost", "prune", "mulch", "perennial", "trellis",
                       "pollinator", "greenhouse", "soil", "harvest", "bulb", "graft"}},
    };
    spec.entities = {
        "Alice Smith",    "Bob Keller",    "Clara Jensen",  "David Okafor",  "Elena Vargas",
        "Felix Norden",   "Grace Liu",     "Henrik Dahl",   "Ines Moreau",   "Jonas Weber",
        "River Museum",   "Harbor Bridge", "Sunset Cinema", "Central Depot", "North Pier",
        "Maple Hall",     "Quartz Tower",  "Delta Works",   "March 3",       "July 14",
        "October 9",      "10:30",         "18:45",         "$50",           "$120",
        "75%",            "2024-06-01",    "Long Beach Run"};
    spec.first_names = {"alex", "maria", "james", "sofia", "lukas", "emma",  "noah",
                        "lena", "oscar", "julia", "felix", "nina",  "david", "clara",
                        "leon", "ida",   "erik",  "anna",  "hugo",  "eva"};
    return spec;
}

}  // namespace relink
