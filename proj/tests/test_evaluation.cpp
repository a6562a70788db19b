#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "amq/error.hpp"
#include "amq/evaluation.hpp"
#include "test_support.hpp"

using namespace amq;
using namespace amq::test;

namespace {

EvalReport fixture_report(bool narrow, std::size_t workers = 0) {
    return evaluate(fixture_gold(), fixture_vocab(), fixture_embeddings(), fixture_config(), fixture_provider(), narrow,
                    workers);
}

MetricsPoint point(double cutoff, double f1) {
    MetricsPoint p;
    p.cutoff = cutoff;
    p.f1 = f1;
    return p;
}

}  // namespace

TEST_CASE("metrics from counts") {
    const auto m = metrics_from_counts(0.5, 3, 4, 6);
    CHECK(m.precision == 0.75);
    CHECK(m.recall == 0.5);
    CHECK(m.f1 == doctest::Approx(0.6));
    const auto none = metrics_from_counts(0.5, 0, 0, 0);
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
    CHECK(none.f1 == 0.0);
    CHECK(metrics_from_counts(0.5, 0, 3, 2).f1 == 0.0);
}

TEST_CASE("metrics_at counts distinct gold labels") {
    const std::vector<std::string> gold{"A", "B", "B", "C"};
    const std::vector<std::string> pred{"B", "D"};
    const auto m = metrics_at(gold, pred, 0.6);
    CHECK(m.tp == 1);
    CHECK(m.pred_n == 2);
    CHECK(m.gold_n == 3);
    const std::vector<std::string> lower{"b"};
    CHECK(metrics_at(gold, lower, 0.6).tp == 0);
    CHECK(metrics_at(gold, lower, 0.6, CaseMode::Insensitive).tp == 1);
}

TEST_CASE("best F1 prefers the lowest cut-off on ties") {
    const std::vector<MetricsPoint> pts{point(0.5, 0.4), point(0.6, 0.8), point(0.7, 0.8), point(0.8, 0.1)};
    const auto b = best_f1(pts, "q");
    CHECK(b.best_cutoff == 0.6);
    CHECK(b.max_f1 == 0.8);
    CHECK(b.name == "q");
}

TEST_CASE("summaries use the sample standard deviation in name order") {
    auto mk = [](std::string name, double p) {
        MetricsPoint m = metrics_from_counts(0.5, 0, 0, 1);
        m.precision = p;
        return QuerySweep{std::move(name), {m}};
    };
    QuerySweep empty{"E", {metrics_from_counts(0.5, 0, 0, 0)}};
    const std::vector<QuerySweep> a{mk("b", 0.2), mk("a", 0.4), mk("c", 0.9), empty};
    const auto s = summarize(a);
    REQUIRE(s.rows.size() == 1);
    CHECK(s.rows[0].n_queries == 3);
    CHECK(s.rows[0].precision.mean == doctest::Approx(0.5));
    CHECK(s.rows[0].precision.sd == doctest::Approx(std::sqrt((0.01 + 0.09 + 0.16) / 2.0)));
    CHECK(s.rows[0].precision.min == 0.2);
    CHECK(s.rows[0].precision.max == 0.9);
    CHECK(s.excluded == std::vector<std::string>{"E"});
    CHECK_FALSE(s.sd_flagged);

    const std::vector<QuerySweep> b{mk("c", 0.9), mk("a", 0.4), mk("b", 0.2)};
    CHECK(summarize(b).rows[0].precision.mean == s.rows[0].precision.mean);
    CHECK(summarize(b).rows[0].precision.sd == s.rows[0].precision.sd);

    const std::vector<QuerySweep> single{mk("a", 0.4)};
    const auto one = summarize(single);
    CHECK(one.sd_flagged);
    CHECK(one.rows[0].precision.sd == 0.0);
}

TEST_CASE("pearson") {
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{2, 4, 6, 8};
    const std::vector<double> z{8, 6, 4, 2};
    CHECK(pearson(x, y) == 1.0);
    CHECK(pearson(x, z) == -1.0);
    const std::vector<double> flat{3, 3, 3, 3};
    try {
        pearson(x, flat);
        FAIL("expected UndefinedCorrelation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UndefinedCorrelation);
    }
    const std::vector<double> shorter{1, 2};
    CHECK_THROWS_AS(pearson(x, shorter), Error);
    const std::vector<double> one{1};
    CHECK_THROWS_AS(pearson(one, one), Error);
    const std::vector<double> u{1, 2, 3};
    const std::vector<double> v{1, 3, 2};
    CHECK(pearson(u, v) == doctest::Approx(0.5));
}

TEST_CASE("narrow filter") {
    const std::vector<GoldQuery> g{{"q", "p", {{"a", Scope::Narrow}, {"b", Scope::Broad}}}};
    const auto n = narrow_filter(g);
    REQUIRE(n.size() == 1);
    REQUIRE(n[0].entries.size() == 1);
    CHECK(n[0].entries[0].label == "a");
}

TEST_CASE("fixture evaluation reproduces the reference outputs") {
    const auto r = fixture_report(false);
    CHECK(report_json_text(r) == slurp(golden_path("report.json")));
    CHECK(table2_csv(r) == slurp(golden_path("table2.csv")));
    CHECK(table3_csv(r) == slurp(golden_path("table3.csv")));
    CHECK(sanitization_csv(r) == slurp(golden_path("sanitization.csv")));
    CHECK(r.provider_id == "lexical-hash-fnv1a64-d256");
    CHECK(r.vocab_version == "fixture-1.0");
    CHECK(r.pearson_r_maxf1_vs_goldn.has_value());
}

TEST_CASE("narrow evaluation reproduces the reference outputs") {
    const auto r = fixture_report(true);
    CHECK(r.narrow_mode);
    CHECK(report_json_text(r) == slurp(golden_path("report_narrow.json")));
    CHECK(table2_csv(r) == slurp(golden_path("table2_narrow.csv")));
    CHECK(table3_csv(r) == slurp(golden_path("table3_narrow.csv")));
    CHECK(std::find(r.excluded_queries.begin(), r.excluded_queries.end(), "Volume Depletion") !=
          r.excluded_queries.end());
}

TEST_CASE("evaluation does not depend on worker count or gold order") {
    const auto one = fixture_report(false, 1);
    const auto many = fixture_report(false, 7);
    CHECK(report_json_text(one) == report_json_text(many));

    auto gold = fixture_gold();
    std::reverse(gold.begin(), gold.end());
    const auto rev = evaluate(gold, fixture_vocab(), fixture_embeddings(), fixture_config(), fixture_provider(), false);
    CHECK(table2_csv(rev) == table2_csv(one));
    CHECK(table3_csv(rev) == table3_csv(one));
}

TEST_CASE("recall falls and precision rises across the fixture sweep") {
    const auto r = fixture_report(false);
    CHECK(r.sweep.front().recall.mean > r.sweep.back().recall.mean);
    CHECK(r.sweep.front().precision.mean < r.sweep.back().precision.mean);
    for (std::size_t i = 1; i < r.sweep.size(); ++i) CHECK(r.sweep[i].recall.mean <= r.sweep[i - 1].recall.mean);
}

TEST_CASE("evaluation with every gold list emptied") {
    const std::vector<GoldQuery> gold{{"Only", "Tremor", {{"Not a term", Scope::Broad}}}};
    const auto r = evaluate(gold, fixture_vocab(), fixture_embeddings(), fixture_config(), fixture_provider(), false);
    CHECK(r.excluded_queries == std::vector<std::string>{"Only"});
    CHECK(r.sd_flagged);
    CHECK_FALSE(r.pearson_r_maxf1_vs_goldn.has_value());
    CHECK(r.sanitization.per_query[0].emptied);
    CHECK(report_to_json(r)["pearson_r_maxf1_vs_goldn"].is_null());
}
