#include <cstdio>
#include <sstream>

#include <doctest.h>

#include "amq/error.hpp"
#include "amq/retrieval.hpp"
#include "test_support.hpp"

using namespace amq;
using amq::test::fixture_embeddings;
using amq::test::fixture_provider;
using amq::test::fixture_vocab;

TEST_CASE("fuzzy similarity") {
    CHECK(fuzzy_similarity("Tremors", "Tremor") == doctest::Approx(6.0 / 7.0));
    CHECK(fuzzy_similarity("", "") == 1.0);
    CHECK(fuzzy_similarity("", "abc") == 0.0);
    CHECK(fuzzy_similarity("kitten", "sitting") == doctest::Approx(1.0 - 3.0 / 7.0));
    CHECK(fuzzy_similarity("TREMOR", "tremor") == 0.0);
    CHECK(fuzzy_similarity("TREMOR", "tremor", CaseMode::Insensitive) == 1.0);
    // Code points, not bytes: one substitution in four characters.
    CHECK(fuzzy_similarity("\xC3\x96" "dem", "Odem") == doctest::Approx(0.75));
    CHECK(fuzzy_similarity("ab", "ba") == fuzzy_similarity("ba", "ab"));
}

TEST_CASE("exact label takes the lexical branch") {
    const auto m = best_term_match("Tremor", fixture_vocab(), fixture_embeddings(), fixture_provider());
    CHECK(m.method == MatchMethod::Lexical);
    REQUIRE(m.matched.size() == 1);
    CHECK(m.matched[0].label == "Tremor");
    CHECK(m.matched[0].score == 1.0);
    CHECK(m.best_vector == fixture_embeddings().at("10010528"));
    CHECK(m.query_vector == lexical_hash_embed("Tremor", 256));
    CHECK_FALSE(m.degenerate);
}

TEST_CASE("near miss falls through to the semantic branch") {
    const auto m = best_term_match("Tremors", fixture_vocab(), fixture_embeddings(), fixture_provider());
    CHECK(m.method == MatchMethod::Semantic);
    REQUIRE(m.matched.size() == kSemanticTopK);
    CHECK(m.matched[0].label == "Tremor");
    CHECK(m.matched[0].score >= m.matched[1].score);
    CHECK(m.matched[1].score >= m.matched[2].score);
    std::vector<Vector> top;
    for (const auto& t : m.matched) top.push_back(fixture_embeddings().at(t.code));
    CHECK(m.best_vector == composite_embedding(top));
}

TEST_CASE("fuzzy threshold is strict") {
    const double exact = fuzzy_similarity("Tremors", "Tremor");
    const auto at = best_term_match("Tremors", fixture_vocab(), fixture_embeddings(), fixture_provider(), exact);
    CHECK(at.method == MatchMethod::Semantic);
    const auto below =
        best_term_match("Tremors", fixture_vocab(), fixture_embeddings(), fixture_provider(), exact - 1e-9);
    CHECK(below.method == MatchMethod::Lexical);
    CHECK(below.matched[0].label == "Tremor");
    CHECK(below.matched[0].score == exact);
}

TEST_CASE("lexical ties go to the smaller label") {
    const auto vocab = parse_vocabulary("code,label,level,current\n1,abce,PT,Y\n2,abcd,PT,Y\n3,zzzz,PT,Y\n");
    const LexicalHashProvider p(64);
    const auto emb = embed_vocabulary(p, vocab);
    const auto m = best_term_match("abcx", vocab, emb, p, 0.5);
    CHECK(m.method == MatchMethod::Lexical);
    CHECK(m.matched[0].label == "abcd");
}

TEST_CASE("case-insensitive vocabularies match case-insensitively") {
    const auto vocab = parse_vocabulary("code,label,level,current\n1,Tremor,PT,Y\n2,Rash,PT,Y\n",
                                        CaseMode::Insensitive);
    const LexicalHashProvider p(64);
    const auto emb = embed_vocabulary(p, vocab);
    const auto m = best_term_match("TREMOR", vocab, emb, p);
    CHECK(m.method == MatchMethod::Lexical);
    CHECK(m.matched[0].score == 1.0);
}

TEST_CASE("composite embedding") {
    const Vector a = lexical_hash_embed("alpha", 32);
    const Vector b = lexical_hash_embed("beta", 32);
    const std::vector<Vector> one{a};
    CHECK(composite_embedding(one) == a);
    const std::vector<Vector> two{a, b};
    const Vector c = composite_embedding(two);
    CHECK(c.norm() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(cosine(c, a) > 0.0);
    std::vector<float> neg(a.components().begin(), a.components().end());
    for (auto& x : neg) x = -x;
    const std::vector<Vector> opposite{a, Vector(neg)};
    CHECK(composite_embedding(opposite).is_zero());
}

TEST_CASE("composite for a semantic phrase matches the reference") {
    const auto lines = [] {
        std::istringstream in(amq::test::slurp(amq::test::golden_path("composite_sleeplessness_at_night.txt")));
        std::vector<std::string> out;
        for (std::string l; std::getline(in, l);) out.push_back(l);
        return out;
    }();
    REQUIRE(lines.size() >= 3);
    const auto m = best_term_match("sleeplessness at night", fixture_vocab(), fixture_embeddings(), fixture_provider());
    CHECK(m.method == MatchMethod::Semantic);
    std::string codes;
    for (const auto& t : m.matched) codes += (codes.empty() ? "" : " ") + t.code;
    CHECK(codes == lines[0]);
    std::string comps;
    char buf[32];
    for (float x : m.best_vector.components()) {
        std::snprintf(buf, sizeof buf, "%.9e", static_cast<double>(x));
        comps += (comps.empty() ? "" : " ") + std::string(buf);
    }
    CHECK(comps == lines[2]);
}

TEST_CASE("empty phrase is rejected") {
    CHECK_THROWS_AS(best_term_match("   ", fixture_vocab(), fixture_embeddings(), fixture_provider()), Error);
}
