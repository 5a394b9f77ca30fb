#include <doctest.h>

#include "relink/reference.hpp"
#include "relink/util.hpp"
#include "test_util.hpp"

using namespace relink;

TEST_CASE("geocode normalizes keys and misses are values") {
    Gazetteer g = test::small_gazetteer();

    CHECK(!g.geocode(""));
    CHECK(!g.geocode("Atlantis"));

    auto hh = g.geocode("Hamburg, Germany");
    REQUIRE(hh);
    CHECK(hh->lat == doctest::Approx(53.5511));
    CHECK(hh->lon == doctest::Approx(9.9937));

    auto messy = g.geocode("  hamburg,  germany ");
    REQUIRE(messy);
    CHECK(messy->lat == hh->lat);
    CHECK(messy->lon == hh->lon);
}

TEST_CASE("geocode resolves known country suffixes to centroids") {
    Gazetteer g = test::small_gazetteer();
    auto de = g.geocode("Germany");
    REQUIRE(de);
    CHECK(de->lat == doctest::Approx((52.5200 + 53.5511) / 2.0));
    CHECK(de->lon == doctest::Approx((13.4050 + 9.9937) / 2.0));

    CHECK(g.country_of("Berlin, Germany") == std::string("germany"));
    CHECK(!g.country_of("Springfield"));
}

TEST_CASE("gazetteer load validates coordinates") {
    auto dir = test::scratch_dir("gaz");
    auto bad = test::write_file(dir, "bad.csv", "place,lat,lon\nNowhere,123.0,0.0\n");
    CHECK_THROWS_AS(Gazetteer::load(bad), DataError);

    auto quoted = test::write_file(dir, "ok.csv",
                                   "place,lat,lon\n\"Hamburg, Germany\",53.5511,9.9937\n");
    Gazetteer g = Gazetteer::load(quoted);
    CHECK(g.geocode("Hamburg, Germany"));
}

TEST_CASE("gender distribution follows the fixture counts") {
    NameGenderTable t = test::small_names();

    CHECK(!t.probability_male("zork"));
    CHECK(!t.probability_male(""));
    CHECK(*t.probability_male("alex") == doctest::Approx(0.9));
    CHECK(*t.probability_male("pat") == doctest::Approx(0.5));
    // first token only, case-insensitive
    CHECK(*t.probability_male("Alex Johnson") == doctest::Approx(0.9));

    auto p = t.probability_male("maria");
    REQUIRE(p);
    CHECK(*p >= 0.0);
    CHECK(*p <= 1.0);
    CHECK(*p == doctest::Approx(1.0 - 985.0 / 1000.0));  // complement of P(female)

    CHECK_THROWS_AS(t.add("ghost", 0, 0), DataError);
}

TEST_CASE("sentiment scores count lexicon hits and sum to one") {
    SentimentLexicon lex = test::small_lexicon();

    CHECK(lex.scores("") == std::pair<double, double>{0.5, 0.5});
    CHECK(lex.scores("the weather report") == std::pair<double, double>{0.5, 0.5});

    // 3 positive hits, 1 negative
    auto [p, n] = lex.scores("great great happy but awful");
    CHECK(p == doctest::Approx(0.75));
    CHECK(n == doctest::Approx(0.25));
    CHECK(p + n == 1.0);

    auto even = lex.scores("happy sad");
    CHECK(even.first == doctest::Approx(0.5));
    CHECK(even.second == doctest::Approx(0.5));

    // tokenization is on non-alphanumeric boundaries, case-folded
    auto punct = lex.scores("GREAT!!!x hate...");
    CHECK(punct.first == doctest::Approx(0.5));  // "great" glued to x? no: '!' splits; "x" ignored
    CHECK(punct.first + punct.second == 1.0);
}

TEST_CASE("lexicon sets must be disjoint") {
    SentimentLexicon lex;
    lex.add_positive("fine");
    CHECK_THROWS_AS(lex.add_negative("fine"), DataError);
}

TEST_CASE("entity extraction matches the rule oracle on fixture strings") {
    // run the documented rules by hand: sentence-initial "Meet" is dropped,
    // the remaining capitalized run and the time token survive
    auto e1 = extract_entities("Meet Alice Smith at 10:30");
    CHECK(e1 == std::map<std::string, int>{{"alice smith", 1}, {"10:30", 1}});

    auto e2 = extract_entities("50% off until March 3");
    CHECK(e2 == std::map<std::string, int>{{"50%", 1}, {"march 3", 1}});

    CHECK(extract_entities("").empty());
    CHECK(extract_entities("nothing to see here").empty());

    // sentence-initial word kept when it recurs capitalized mid-sentence
    auto e3 = extract_entities("Smith rejected the offer. We met Smith later.");
    CHECK(e3["smith"] == 2);

    // money, iso dates, multiplicity
    auto e4 = extract_entities("Paid $50 on 2024-06-01, then $50 again");
    CHECK(e4["$50"] == 2);
    CHECK(e4["2024-06-01"] == 1);
}

TEST_CASE("entity extraction ignores casing of non-entity words") {
    const std::string base = "Meet Alice Smith at 10:30 before the show";
    const std::string scrambled = "Meet Alice Smith aT 10:30 beFOre tHe shOw";
    CHECK(extract_entities(base) == extract_entities(scrambled));
}

TEST_CASE("render_entities round-trips through the extractor") {
    std::map<std::string, int> entities = {{"alice smith", 2}, {"march 3", 1},   {"10:30", 1},
                                           {"$50", 1},         {"75%", 1},       {"2024-06-01", 1},
                                           {"river museum", 1}, {"long beach run", 1}};
    std::string text = render_entities(entities);
    CHECK(extract_entities(text) == entities);

    CHECK(render_entities({}).empty());
}
