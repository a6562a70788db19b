#include <algorithm>

#include <doctest.h>

#include "amq/error.hpp"
#include "amq/json_format.hpp"
#include "amq/pipeline.hpp"
#include "amq/service.hpp"
#include "test_support.hpp"

using namespace amq;
using namespace amq::test;

namespace {

const std::vector<std::string> kGoldenPhrases{
    "Tremor",        "Tremors",   "Insomnia",      "sleeplessness at night", "Hypoglycaemia",
    "Diarrhoea",     "Bone fracture", "Gout",      "Skin rash, itching",     "Respiratory depression",
};

class FailingProvider final : public EmbeddingProvider {
public:
    std::string id() const override { return "lexical-hash-fnv1a64-d256"; }
    std::size_t batch_size() const override { return 1; }
    std::vector<Vector> embed_batch(std::span<const std::string>) const override {
        count_call();
        throw provider_error("upstream unavailable", 503);
    }
};

}  // namespace

TEST_CASE("cut-off grid") {
    const auto g = make_cutoff_grid(0.50, 0.90, 0.05);
    REQUIRE(g.size() == 9);
    CHECK(g.front() == 0.5);
    CHECK(g[1] == 0.55);
    CHECK(g.back() == 0.9);
    CHECK(AmqConfig{}.cutoff_grid == g);
    CHECK(parse_cutoff_grid("0.5:0.9:0.1").size() == 5);
    CHECK(parse_cutoff_grid("0.3:0.3:0.1") == std::vector<double>{0.3});
    CHECK(parse_cutoff_grid(" 0.1 : 0.2 : 0.05 ").size() == 3);
    CHECK_THROWS_AS(parse_cutoff_grid("0.5:0.9"), Error);
    CHECK_THROWS_AS(parse_cutoff_grid("a:b:c"), Error);
    CHECK_THROWS_AS(parse_cutoff_grid("0.9:0.5:0.05"), Error);
    CHECK_THROWS_AS(parse_cutoff_grid("0.5:0.9:0"), Error);
}

TEST_CASE("config json round-trip and validation") {
    AmqConfig c;
    c.fuzzy_threshold = 0.8;
    c.case_mode = CaseMode::Insensitive;
    c.default_cutoff = 0.7;
    c.cutoff_grid = {0.6, 0.7};
    c.provider.dims = 128;
    const AmqConfig back = config_from_json(config_to_json(c));
    CHECK(back.fuzzy_threshold == 0.8);
    CHECK(back.case_mode == CaseMode::Insensitive);
    CHECK(back.default_cutoff == 0.7);
    CHECK(back.cutoff_grid == c.cutoff_grid);
    CHECK(back.provider.dims == 128);

    const auto from_string = config_from_json(nlohmann::json::parse(R"({"cutoff_grid": "0.5:0.6:0.05"})"));
    CHECK(from_string.cutoff_grid.size() == 3);
    const auto http = config_from_json(nlohmann::json::parse(
        R"({"provider": {"kind": "HTTP_API", "endpoint": "https://e.example/v1", "model_name": "m", "timeout_ms": 100}})"));
    CHECK(http.provider.kind == ProviderKind::HttpApi);
    CHECK(http.provider.timeout == std::chrono::milliseconds(100));

    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"fuzzy_threshold": 1.5})")), Error);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"default_cutoff": -0.1})")), Error);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"case_mode": "SHOUTY"})")), Error);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"provider": {"kind": "NOPE"}})")), Error);
}

TEST_CASE("query results match the reference documents") {
    for (const auto& phrase : kGoldenPhrases) {
        CAPTURE(phrase);
        const auto r = run_query(phrase, fixture_vocab(), fixture_embeddings(), fixture_config(), fixture_provider());
        CHECK(dump_fixed(query_response_json(r, 0.0)) + "\n" == slurp(golden_path("query_" + slug(phrase) + ".json")));
    }
}

TEST_CASE("pipeline invariants") {
    for (const auto& phrase : kGoldenPhrases) {
        CAPTURE(phrase);
        const auto r = run_query(phrase, fixture_vocab(), fixture_embeddings(), fixture_config(), fixture_provider());
        REQUIRE_FALSE(r.ranked.empty());
        for (const auto& m : r.match.matched) {
            CHECK(std::any_of(r.ranked.begin(), r.ranked.end(), [&](const ScoredTerm& t) { return t.code == m.code; }));
        }
        for (std::size_t i = 1; i < r.ranked.size(); ++i) CHECK(r.ranked[i - 1].sim_best >= r.ranked[i].sim_best);
        for (const auto& t : r.ranked) {
            CHECK(t.retained);
            CHECK(t.combined == doctest::Approx((t.sim_query + t.sim_best) / 2));
        }
        CHECK(r.split.low_count + r.split.high_count == fixture_vocab().pt_count());
    }
}

TEST_CASE("exact-label query ranks itself first") {
    const auto r = run_query("Insomnia", fixture_vocab(), fixture_embeddings(), fixture_config(), fixture_provider());
    CHECK(r.match.method == MatchMethod::Lexical);
    CHECK(r.ranked.front().label == "Insomnia");
    CHECK(r.ranked.front().sim_best == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("query response respects cut-off and max_terms") {
    const auto r = run_query("Tremor", fixture_vocab(), fixture_embeddings(), fixture_config(), fixture_provider());
    const auto all = query_response_json(r, 0.0);
    const auto cut = query_response_json(r, 0.6, std::size_t{2});
    CHECK(all["terms"].size() == r.ranked.size());
    CHECK(cut["terms"].size() == 2);
    CHECK(cut["total_retained"] == r.ranked.size());
    CHECK(cut["terms"][1]["rank"] == 2);
    CHECK(all["match"]["method"] == "LEXICAL");
}

TEST_CASE("pipeline errors carry the stage name and keep their kind") {
    const FailingProvider p;
    try {
        run_query("Tremor", fixture_vocab(), fixture_embeddings(), fixture_config(), p);
        FAIL("expected a provider error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Provider);
        CHECK(e.status() == 503);
        CHECK(std::string(e.what()).find("retrieval") != std::string::npos);
    }
    try {
        run_query("", fixture_vocab(), fixture_embeddings(), fixture_config(), fixture_provider());
        FAIL("expected an input error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Input);
    }
}
