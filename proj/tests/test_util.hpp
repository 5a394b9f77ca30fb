#pragma once
// Shared helpers for the test suites: scratch directories and tiny fixture
// builders.

#include <filesystem>
#include <fstream>
#include <string>

#include "relink/corpus.hpp"
#include "relink/reference.hpp"
#include "relink/similarity.hpp"

namespace relink::test {

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("relink_tests_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                        const std::string& content) {
    auto p = dir / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
}

inline std::filesystem::path data_dir() { return std::filesystem::path(RELINK_DATA_DIR); }

inline Gazetteer small_gazetteer() {
    Gazetteer g;
    g.add("Berlin, Germany", {52.5200, 13.4050});
    g.add("Hamburg, Germany", {53.5511, 9.9937});
    g.add("Paris, France", {48.8566, 2.3522});
    g.add("Lyon, France", {45.7640, 4.8357});
    g.add("Tokyo, Japan", {35.6762, 139.6503});
    g.finalize();
    return g;
}

inline NameGenderTable small_names() {
    NameGenderTable t;
    t.add("alex", 900, 100);
    t.add("pat", 500, 500);
    t.add("maria", 15, 985);
    return t;
}

inline SentimentLexicon small_lexicon() {
    SentimentLexicon lex;
    lex.add_positive("great");
    lex.add_positive("happy");
    lex.add_positive("love");
    lex.add_negative("awful");
    lex.add_negative("sad");
    lex.add_negative("hate");
    return lex;
}

inline Providers small_providers() {
    return Providers{small_gazetteer(), small_names(), small_lexicon()};
}

inline Profile minimal_profile(const std::string& id, const std::string& network) {
    Profile p;
    p.profile_id = id;
    p.network_id = network;
    return p;
}

}  // namespace relink::test
