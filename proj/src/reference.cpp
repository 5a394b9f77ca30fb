#include "relink/reference.hpp"

#include <algorithm>
#include <cctype>

#include "relink/util.hpp"

namespace relink {

// ---------------------------------------------------------------- Gazetteer

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
    Gazetteer g;
    auto lines = read_lines(path);
    std::size_t start = 0;
    if (!lines.empty()) {
        auto first = parse_csv_line(lines[0]);
        if (first == std::vector<std::string>{"place", "lat", "lon"}) start = 1;
    }
    for (std::size_t i = start; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto f = parse_csv_line(lines[i]);
        if (f.size() != 3)
            throw DataError(path.string() + " line " + std::to_string(i + 1) +
                            ": expected place,lat,lon");
        Coord c;
        try {
            c.lat = std::stod(f[1]);
            c.lon = std::stod(f[2]);
        } catch (const std::exception&) {
            throw DataError(path.string() + " line " + std::to_string(i + 1) +
                            ": malformed coordinate");
        }
        if (c.lat < -90.0 || c.lat > 90.0 || c.lon < -180.0 || c.lon > 180.0)
            throw DataError(path.string() + " line " + std::to_string(i + 1) +
                            ": coordinate out of range");
        g.entries_[normalize_key(f[0])] = c;
    }
    g.finalize();
    return g;
}

void Gazetteer::add(std::string_view place, Coord c) {
    entries_[normalize_key(place)] = c;
}

void Gazetteer::finalize() {
    country_centroids_.clear();
    std::map<std::string, std::pair<Coord, std::size_t>> acc;
    for (const auto& [place, c] : entries_) {
        auto comma = place.rfind(',');
        if (comma == std::string::npos) continue;
        std::string country = trim(std::string_view(place).substr(comma + 1));
        if (country.empty()) continue;
        auto& [sum, n] = acc[country];
        sum.lat += c.lat;
        sum.lon += c.lon;
        ++n;
    }
    for (const auto& [country, sc] : acc)
        country_centroids_[country] = {sc.first.lat / double(sc.second),
                                       sc.first.lon / double(sc.second)};
}

std::optional<Coord> Gazetteer::geocode(std::string_view place) const {
    std::string key = normalize_key(place);
    if (key.empty()) return std::nullopt;
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    if (auto it = country_centroids_.find(key); it != country_centroids_.end()) return it->second;
    return std::nullopt;
}

std::optional<std::string> Gazetteer::country_of(std::string_view place) const {
    std::string key = normalize_key(place);
    auto comma = key.rfind(',');
    if (comma == std::string::npos) return std::nullopt;
    std::string country = trim(std::string_view(key).substr(comma + 1));
    if (country.empty()) return std::nullopt;
    return country;
}

// ---------------------------------------------------------- NameGenderTable

NameGenderTable NameGenderTable::load(const std::filesystem::path& path) {
    NameGenderTable t;
    auto lines = read_lines(path);
    std::size_t start = 0;
    if (!lines.empty()) {
        auto first = parse_csv_line(lines[0]);
        if (first == std::vector<std::string>{"name", "male_count", "female_count"}) start = 1;
    }
    for (std::size_t i = start; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto f = parse_csv_line(lines[i]);
        if (f.size() != 3)
            throw DataError(path.string() + " line " + std::to_string(i + 1) +
                            ": expected name,male_count,female_count");
        std::uint64_t male = 0, female = 0;
        try {
            male = std::stoull(f[1]);
            female = std::stoull(f[2]);
        } catch (const std::exception&) {
            throw DataError(path.string() + " line " + std::to_string(i + 1) + ": malformed count");
        }
        t.add(f[0], male, female);
    }
    return t;
}

void NameGenderTable::add(std::string_view name, std::uint64_t male, std::uint64_t female) {
    if (male + female == 0)
        throw DataError("name '" + std::string(name) + "' has zero total count");
    rows_[normalize_key(name)] = {male, female};
}

std::optional<double> NameGenderTable::probability_male(std::string_view name) const {
    auto tokens = split_ws(normalize_key(name));
    if (tokens.empty()) return std::nullopt;
    auto it = rows_.find(tokens.front());
    if (it == rows_.end()) return std::nullopt;
    auto [male, female] = it->second;
    return double(male) / double(male + female);
}

// ---------------------------------------------------------- SentimentLexicon

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& positive,
                                        const std::filesystem::path& negative) {
    SentimentLexicon lex;
    for (const std::string& line : read_lines(positive)) {
        std::string tok = to_lower(trim(line));
        if (!tok.empty()) lex.positive_.insert(tok);
    }
    for (const std::string& line : read_lines(negative)) {
        std::string tok = to_lower(trim(line));
        if (!tok.empty()) lex.negative_.insert(tok);
    }
    for (const std::string& tok : lex.positive_)
        if (lex.negative_.count(tok))
            throw DataError("sentiment lexicon sets overlap on '" + tok + "'");
    return lex;
}

void SentimentLexicon::add_positive(std::string tok) {
    if (negative_.count(tok)) throw DataError("sentiment lexicon sets overlap on '" + tok + "'");
    positive_.insert(std::move(tok));
}

void SentimentLexicon::add_negative(std::string tok) {
    if (positive_.count(tok)) throw DataError("sentiment lexicon sets overlap on '" + tok + "'");
    negative_.insert(std::move(tok));
}

std::vector<std::string> SentimentLexicon::positive_tokens() const {
    std::vector<std::string> out(positive_.begin(), positive_.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> SentimentLexicon::negative_tokens() const {
    std::vector<std::string> out(negative_.begin(), negative_.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::pair<double, double> SentimentLexicon::scores(std::string_view text) const {
    std::size_t pos_hits = 0, neg_hits = 0;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            if (positive_.count(cur)) ++pos_hits;
            else if (negative_.count(cur)) ++neg_hits;
            cur.clear();
        }
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            cur.push_back(char(std::tolower(static_cast<unsigned char>(c))));
        else
            flush();
    }
    flush();
    if (pos_hits + neg_hits == 0) return {0.5, 0.5};
    double p = double(pos_hits) / double(pos_hits + neg_hits);
    return {p, 1.0 - p};
}

// ----------------------------------------------------------- entity extractor

namespace {

const char* kMonths[] = {"january", "february", "march",     "april",   "may",      "june",
                         "july",    "august",   "september", "october", "november", "december"};

bool is_month(const std::string& lower) {
    for (const char* m : kMonths)
        if (lower == m) return true;
    return false;
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

bool is_number(std::string_view s) {
    // digits with at most one . or , separator
    if (s.empty()) return false;
    int seps = 0;
    bool digit_seen = false;
    for (char c : s) {
        if (std::isdigit(static_cast<unsigned char>(c))) digit_seen = true;
        else if (c == '.' || c == ',') ++seps;
        else return false;
    }
    return digit_seen && seps <= 1;
}

bool is_time_token(std::string_view s) {
    auto colon = s.find(':');
    if (colon == std::string_view::npos) return false;
    auto h = s.substr(0, colon), m = s.substr(colon + 1);
    return (h.size() >= 1 && h.size() <= 2 && all_digits(h)) && (m.size() == 2 && all_digits(m));
}

bool is_iso_date(std::string_view s) {
    return s.size() == 10 && all_digits(s.substr(0, 4)) && s[4] == '-' &&
           all_digits(s.substr(5, 2)) && s[7] == '-' && all_digits(s.substr(8, 2));
}

bool is_percent_token(std::string_view s) {
    return s.size() >= 2 && s.back() == '%' && is_number(s.substr(0, s.size() - 1));
}

// Currency prefixes: $, UTF-8 euro and pound signs.
std::size_t currency_prefix_len(std::string_view s) {
    if (!s.empty() && s[0] == '$') return 1;
    if (s.size() >= 3 && (unsigned char)s[0] == 0xE2 && (unsigned char)s[1] == 0x82 &&
        (unsigned char)s[2] == 0xAC)
        return 3;
    if (s.size() >= 2 && (unsigned char)s[0] == 0xC2 && (unsigned char)s[1] == 0xA3) return 2;
    return 0;
}

bool is_money_token(std::string_view s) {
    std::size_t n = currency_prefix_len(s);
    return n > 0 && is_number(s.substr(n));
}

bool is_capitalized_word(std::string_view s) {
    if (s.empty() || !std::isupper(static_cast<unsigned char>(s[0]))) return false;
    for (std::size_t i = 1; i < s.size(); ++i) {
        char c = s[i];
        if (!std::isalpha(static_cast<unsigned char>(c)) && c != '\'' && c != '-') return false;
    }
    return true;
}

struct Word {
    std::string text;          // punctuation-stripped
    bool starts_sentence = false;
    bool ends_sentence = false;
};

std::vector<Word> split_words(std::string_view text) {
    std::vector<Word> words;
    std::size_t i = 0;
    bool next_starts = true;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        if (i >= text.size()) break;
        std::size_t b = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        std::string_view raw = text.substr(b, i - b);
        // strip surrounding punctuation, keep token-internal symbols
        std::size_t s = 0, e = raw.size();
        auto is_strip = [](char c) {
            return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':' ||
                   c == '(' || c == ')' || c == '[' || c == ']' || c == '"' || c == '\'';
        };
        bool ends = false;
        while (e > s && is_strip(raw[e - 1])) {
            if (raw[e - 1] == '.' || raw[e - 1] == '!' || raw[e - 1] == '?') ends = true;
            --e;
        }
        while (s < e && is_strip(raw[s]) && currency_prefix_len(raw.substr(s)) == 0) {
            // do not strip an apostrophe that starts a word like 'tis; cheap rule:
            // strip anyway, apostrophes mid-word survive
            ++s;
        }
        if (e > s) {
            Word w;
            w.text = std::string(raw.substr(s, e - s));
            w.starts_sentence = next_starts;
            w.ends_sentence = ends;
            words.push_back(std::move(w));
            next_starts = ends;
        } else if (ends && !words.empty()) {
            words.back().ends_sentence = true;
            next_starts = true;
        }
    }
    return words;
}

}  // namespace

std::map<std::string, int> extract_entities(std::string_view text) {
    std::map<std::string, int> out;
    std::vector<Word> words = split_words(text);
    std::vector<bool> consumed(words.size(), false);

    // pattern tokens first: they take precedence over capitalized runs
    for (std::size_t i = 0; i < words.size(); ++i) {
        const std::string& w = words[i].text;
        if (is_time_token(w) || is_iso_date(w) || is_percent_token(w) || is_money_token(w)) {
            out[to_lower(w)] += 1;
            consumed[i] = true;
        } else if (is_month(to_lower(w)) && i + 1 < words.size() && !words[i].ends_sentence &&
                   all_digits(words[i + 1].text) && words[i + 1].text.size() <= 2) {
            out[to_lower(w) + " " + words[i + 1].text] += 1;
            consumed[i] = consumed[i + 1] = true;
            ++i;
        }
    }

    // capitalized words seen mid-sentence anywhere (for the sentence-initial rule)
    std::unordered_set<std::string> mid_sentence_caps;
    for (std::size_t i = 0; i < words.size(); ++i)
        if (!words[i].starts_sentence && is_capitalized_word(words[i].text))
            mid_sentence_caps.insert(to_lower(words[i].text));

    for (std::size_t i = 0; i < words.size();) {
        if (consumed[i] || !is_capitalized_word(words[i].text)) {
            ++i;
            continue;
        }
        // run start; sentence-initial first word is kept only if it recurs
        // capitalized mid-sentence elsewhere in the text
        std::size_t b = i;
        if (words[b].starts_sentence && !mid_sentence_caps.count(to_lower(words[b].text))) {
            ++b;
            if (b >= words.size() || consumed[b] || !is_capitalized_word(words[b].text) ||
                words[b - 1].ends_sentence) {
                i = b;
                continue;
            }
        }
        std::size_t e = b;
        std::string run = to_lower(words[e].text);
        while (e + 1 < words.size() && !consumed[e + 1] && !words[e].ends_sentence &&
               is_capitalized_word(words[e + 1].text)) {
            ++e;
            run += " " + to_lower(words[e].text);
        }
        out[run] += 1;
        i = e + 1;
    }
    return out;
}

std::string render_entities(const std::map<std::string, int>& entities) {
    std::string out;
    bool first = true;
    for (const auto& [tok, count] : entities) {
        for (int c = 0; c < count; ++c) {
            out += first ? "note " : " and ";
            first = false;
            if (is_time_token(tok) || is_iso_date(tok) || is_percent_token(tok) ||
                is_money_token(tok)) {
                out += tok;
            } else {
                // title-case each word; covers both name runs and month-day dates
                bool cap_next = true;
                for (char c2 : tok) {
                    if (cap_next && std::isalpha(static_cast<unsigned char>(c2))) {
                        out.push_back(char(std::toupper(static_cast<unsigned char>(c2))));
                        cap_next = false;
                    } else {
                        out.push_back(c2);
                        if (c2 == ' ') cap_next = true;
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace relink
