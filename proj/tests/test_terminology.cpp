#include <algorithm>

#include <doctest.h>

#include "amq/csv.hpp"
#include "amq/error.hpp"
#include "amq/terminology.hpp"
#include "test_support.hpp"

using namespace amq;
using amq::test::fixture_vocab;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected amq::Error");
    return ErrorKind::Input;
}

std::optional<std::size_t> line_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.line();
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("csv reader handles quoting, CRLF, BOM and blank lines") {
    const auto recs = csv::parse("\xEF\xBB\xBF" "a,b\r\n\r\n\"x, y\",\"say \"\"hi\"\"\"\n\"multi\nline\",z\n");
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].fields == std::vector<std::string>{"a", "b"});
    CHECK(recs[1].line == 3);
    CHECK(recs[1].fields == std::vector<std::string>{"x, y", "say \"hi\""});
    CHECK(recs[2].fields[0] == "multi\nline");
    CHECK(recs[2].line == 4);
}

TEST_CASE("csv reader rejects malformed quoting with a line number") {
    CHECK(line_of([] { csv::parse("a,b\n\"open,c\n"); }) == 2);
    CHECK(kind_of([] { csv::parse("\"ab\"c,d\n"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { csv::parse("ab\"c,d\n"); }) == ErrorKind::Parse);
}

TEST_CASE("csv escape round-trips") {
    CHECK(csv::escape("plain") == "plain");
    CHECK(csv::escape("a,b") == "\"a,b\"");
    CHECK(csv::escape("q\"") == "\"q\"\"\"");
    const std::vector<std::string> row{"a,b", "c\nd", "e"};
    CHECK(csv::parse(csv::join_row(row)).at(0).fields == row);
}

TEST_CASE("fixture vocabulary shape") {
    const auto& v = fixture_vocab();
    CHECK(v.terms().size() == 200);
    CHECK(v.pt_count() == 180);
    CHECK(v.version() == "fixture-1.0");
    REQUIRE(v.lookup_exact("Tremor") != nullptr);
    CHECK(v.lookup_exact("Tremor")->code == "10010528");
    CHECK(v.lookup_exact("tremor") == nullptr);
    // LLTs, non-current PTs and OTHER terms never resolve.
    CHECK(v.lookup_exact("Sleeplessness") == nullptr);
    CHECK(v.lookup_exact("Drowsiness") == nullptr);
    CHECK(v.lookup_exact("Antidiarrheal supportive care") == nullptr);
    CHECK(v.find_code("10010000")->label == "Insomnia");
    for (const Term* t : v.current_pts()) CHECK(t->is_current_pt());
}

TEST_CASE("vocabulary copies keep working indexes") {
    Vocabulary copy = fixture_vocab();
    Vocabulary assigned;
    assigned = copy;
    CHECK(copy == fixture_vocab());
    REQUIRE(assigned.lookup_exact("Insomnia") != nullptr);
    CHECK(assigned.lookup_exact("Insomnia") == assigned.find_code("10010000"));
    CHECK(assigned.current_pts().front() == &assigned.terms()[0]);
}

TEST_CASE("case-insensitive vocabulary") {
    const auto v = parse_vocabulary("code,label,level,current\n1,Tremor,PT,Y\n2,Rash,PT,Y\n", CaseMode::Insensitive);
    CHECK(v.lookup_exact("TREMOR")->code == "1");
    CHECK(v.version() == "unversioned");
    const std::string dup = "code,label,level,current\n1,Tremor,PT,Y\n2,tremor,PT,Y\n";
    CHECK_NOTHROW(parse_vocabulary(dup, CaseMode::Sensitive));
    CHECK(kind_of([&] { parse_vocabulary(dup, CaseMode::Insensitive); }) == ErrorKind::Validation);
    // A non-current duplicate label is not an index collision.
    CHECK_NOTHROW(parse_vocabulary("code,label,level,current\n1,Tremor,PT,Y\n2,Tremor,PT,N\n"));
}

TEST_CASE("vocabulary parse and validation errors") {
    CHECK(kind_of([] { parse_vocabulary("code,label,level\n1,a,PT\n"); }) == ErrorKind::Parse);
    CHECK(line_of([] { parse_vocabulary("code,label,level,current\n1,a,PT,Y\n2,b,PT\n"); }) == 3);
    CHECK(line_of([] { parse_vocabulary("code,label,level,current\n1,a,XX,Y\n"); }) == 2);
    CHECK(line_of([] { parse_vocabulary("code,label,level,current\n1,a,PT,maybe\n"); }) == 2);
    CHECK(kind_of([] { parse_vocabulary("code,label,level,current\n1,a,PT,Y\n1,b,PT,Y\n"); }) ==
          ErrorKind::Validation);
    CHECK(kind_of([] { parse_vocabulary("code,label,level,current\n,a,PT,Y\n"); }) == ErrorKind::Validation);
    CHECK(kind_of([] { parse_vocabulary("code,label,level,current\n1,,PT,Y\n"); }) == ErrorKind::Validation);
}

TEST_CASE("case mode strings") {
    CHECK(to_string(CaseMode::Sensitive) == "CASE_SENSITIVE");
    CHECK(case_mode_from_string("CASE_INSENSITIVE") == CaseMode::Insensitive);
    CHECK(kind_of([] { case_mode_from_string("loud"); }) == ErrorKind::Input);
}

TEST_CASE("fixture gold sets group rows by name") {
    const auto gold = amq::test::fixture_gold();
    REQUIRE(gold.size() == 10);
    std::size_t entries = 0;
    for (const auto& q : gold) entries += q.entries.size();
    CHECK(entries == 73);
    CHECK(gold[0].name == "Insomnia");
    const auto tremor = std::find_if(gold.begin(), gold.end(), [](const GoldQuery& q) { return q.name == "Tremor"; });
    REQUIRE(tremor != gold.end());
    CHECK(tremor->entries.back().label == "Dyskinesia");
    const auto rash = std::find_if(gold.begin(), gold.end(), [](const GoldQuery& q) { return q.name == "Rash"; });
    CHECK(rash->phrase == "Skin rash, itching");
    REQUIRE(rash->entries.size() == 6);
    CHECK(rash->entries.front().scope == Scope::Narrow);
    CHECK(rash->entries.back().scope == Scope::Broad);  // blank scope cell
}

TEST_CASE("gold scope column") {
    const auto g = parse_gold_sets("query_name,query_phrase,term_label,scope\nA,a,X,narrow\nA,a,Y,BROAD\nA,a,Z,\n");
    REQUIRE(g.size() == 1);
    CHECK(g[0].entries[0].scope == Scope::Narrow);
    CHECK(g[0].entries[1].scope == Scope::Broad);
    CHECK(g[0].entries[2].scope == Scope::Broad);
    CHECK(line_of([] { parse_gold_sets("query_name,query_phrase,term_label,scope\nA,a,X,wide\n"); }) == 2);
    CHECK(kind_of([] { parse_gold_sets("query_name,query_phrase,term_label\nA,a,X\nA,b,Y\n"); }) ==
          ErrorKind::Validation);
    CHECK(kind_of([] { parse_gold_sets("name,phrase,label\nA,a,X\n"); }) == ErrorKind::Parse);
}

TEST_CASE("sanitisation drops labels that are not current PTs") {
    const auto gold = amq::test::fixture_gold();
    const auto s = sanitize_gold(gold, fixture_vocab());
    CHECK(s.report.total_excluded == 9);
    CHECK(s.report.affected_queries == 4);
    REQUIRE(s.report.per_query.size() == 10);
    const auto& diarrhea = s.report.per_query[3];
    CHECK(diarrhea.name == "Diarrhea");
    CHECK(diarrhea.excluded_count == 4);
    CHECK(diarrhea.excluded_samples ==
          std::vector<std::string>{"Loose stools", "Stools watery", "Diarrhoea NOS", "Diarrhoea aggravated"});
    for (const auto& q : s.queries)
        for (const auto& e : q.entries) CHECK(fixture_vocab().lookup_exact(e.label) != nullptr);
}

TEST_CASE("sanitisation caps samples and flags emptied queries") {
    std::vector<GoldQuery> gold{{"Q", "q", {}}};
    for (int i = 0; i < 7; ++i) gold[0].entries.push_back({"Missing " + std::to_string(i), Scope::Broad});
    const auto s = sanitize_gold(gold, fixture_vocab());
    REQUIRE(s.queries.size() == 1);
    CHECK(s.queries[0].entries.empty());
    CHECK(s.report.per_query[0].emptied);
    CHECK(s.report.per_query[0].excluded_count == 7);
    CHECK(s.report.per_query[0].excluded_samples.size() == kExcludedSampleCap);
}
