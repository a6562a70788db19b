#include "amq/terminology.hpp"

#include <algorithm>
#include <iterator>
#include <sstream>

#include "amq/csv.hpp"
#include "amq/error.hpp"
#include "amq/text.hpp"

namespace amq {

std::string_view to_string(TermLevel level) noexcept {
    switch (level) {
        case TermLevel::PT: return "PT";
        case TermLevel::LLT: return "LLT";
        case TermLevel::OTHER: return "OTHER";
    }
    return "OTHER";
}

std::string_view to_string(CaseMode mode) noexcept {
    return mode == CaseMode::Sensitive ? "CASE_SENSITIVE" : "CASE_INSENSITIVE";
}

CaseMode case_mode_from_string(std::string_view s) {
    if (s == "CASE_SENSITIVE") return CaseMode::Sensitive;
    if (s == "CASE_INSENSITIVE") return CaseMode::Insensitive;
    throw input_error("unknown case mode '" + std::string(s) + "'");
}

std::string_view to_string(Scope scope) noexcept {
    return scope == Scope::Narrow ? "NARROW" : "BROAD";
}

std::string label_key(std::string_view label, CaseMode mode) {
    return mode == CaseMode::Sensitive ? std::string(label) : ascii_lower(label);
}

std::string read_stream(std::istream& in) {
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Vocabulary::Vocabulary(std::string version, std::vector<Term> terms, CaseMode mode)
    : version_(std::move(version)), mode_(mode), terms_(std::move(terms)) {
    for (const auto& t : terms_) {
        if (t.code.empty()) throw validation_error("term with empty code");
        if (t.label.empty()) throw validation_error("term " + t.code + " has an empty label");
    }
    build_indexes();
}

Vocabulary::Vocabulary(const Vocabulary& other)
    : version_(other.version_), mode_(other.mode_), terms_(other.terms_) {
    build_indexes();
}

Vocabulary& Vocabulary::operator=(const Vocabulary& other) {
    if (this != &other) {
        version_ = other.version_;
        mode_ = other.mode_;
        terms_ = other.terms_;
        build_indexes();
    }
    return *this;
}

void Vocabulary::build_indexes() {
    current_pts_.clear();
    label_index_.clear();
    code_index_.clear();
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const Term& t = terms_[i];
        if (!code_index_.emplace(t.code, i).second) {
            throw validation_error("duplicate code " + t.code);
        }
        if (!t.is_current_pt()) continue;
        if (!label_index_.emplace(label_key(t.label, mode_), i).second) {
            throw validation_error("duplicate current PT label '" + t.label + "'");
        }
        current_pts_.push_back(&t);
    }
}

const Term* Vocabulary::lookup_exact(std::string_view label) const {
    const auto it = label_index_.find(label_key(label, mode_));
    return it == label_index_.end() ? nullptr : &terms_[it->second];
}

const Term* Vocabulary::find_code(std::string_view code) const {
    const auto it = code_index_.find(std::string(code));
    return it == code_index_.end() ? nullptr : &terms_[it->second];
}

namespace {

void expect_header(const std::vector<csv::Record>& records,
                   const std::vector<std::string_view>& required,
                   const std::vector<std::string_view>& optional = {}) {
    if (records.empty()) throw parse_error(1, "missing header row");
    const auto& h = records.front().fields;
    const bool ok_required = h.size() >= required.size() &&
                             std::equal(required.begin(), required.end(), h.begin());
    const bool ok_optional = ok_required && h.size() <= required.size() + optional.size() &&
                             std::equal(h.begin() + static_cast<std::ptrdiff_t>(required.size()), h.end(),
                                        optional.begin());
    if (!ok_required || !ok_optional) {
        std::string want;
        for (auto c : required) want += (want.empty() ? "" : ",") + std::string(c);
        throw parse_error(records.front().line, "unexpected header, expected " + want);
    }
}

TermLevel parse_level(std::string_view s, std::size_t line) {
    if (s == "PT") return TermLevel::PT;
    if (s == "LLT") return TermLevel::LLT;
    if (s == "OTHER") return TermLevel::OTHER;
    throw parse_error(line, "unknown level '" + std::string(s) + "'");
}

bool parse_current(std::string_view s, std::size_t line) {
    if (s == "Y") return true;
    if (s == "N") return false;
    throw parse_error(line, "current must be Y or N, got '" + std::string(s) + "'");
}

Scope parse_scope(std::string_view raw, std::size_t line) {
    const std::string s = ascii_lower(trim(raw));
    if (s.empty() || s == "broad") return Scope::Broad;
    if (s == "narrow") return Scope::Narrow;
    throw parse_error(line, "unknown scope '" + std::string(raw) + "'");
}

}  // namespace

Vocabulary parse_vocabulary(std::string_view text, CaseMode mode, std::string version) {
    const auto records = csv::parse(text);
    expect_header(records, {"code", "label", "level", "current"});
    std::vector<Term> terms;
    terms.reserve(records.size() - 1);
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.fields.size() != 4) {
            throw parse_error(r.line, "expected 4 columns, got " + std::to_string(r.fields.size()));
        }
        Term t{r.fields[0], r.fields[1], parse_level(r.fields[2], r.line), parse_current(r.fields[3], r.line)};
        if (t.code.empty()) throw validation_error("line " + std::to_string(r.line) + ": empty code");
        if (t.label.empty()) throw validation_error("line " + std::to_string(r.line) + ": empty label");
        terms.push_back(std::move(t));
    }
    return Vocabulary(std::move(version), std::move(terms), mode);
}

Vocabulary load_vocabulary(std::istream& in, CaseMode mode, std::string version) {
    return parse_vocabulary(read_stream(in), mode, std::move(version));
}

std::vector<GoldQuery> parse_gold_sets(std::string_view text) {
    const auto records = csv::parse(text);
    expect_header(records, {"query_name", "query_phrase", "term_label"}, {"scope"});
    const std::size_t columns = records.front().fields.size();

    std::vector<GoldQuery> out;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.fields.size() != columns) {
            throw parse_error(r.line, "expected " + std::to_string(columns) + " columns, got " +
                                          std::to_string(r.fields.size()));
        }
        const std::string& name = r.fields[0];
        const std::string_view phrase = trim(r.fields[1]);
        const std::string& label = r.fields[2];
        const Scope scope = columns == 4 ? parse_scope(r.fields[3], r.line) : Scope::Broad;
        if (name.empty()) throw validation_error("line " + std::to_string(r.line) + ": empty query_name");
        if (label.empty()) throw validation_error("line " + std::to_string(r.line) + ": empty term_label");

        auto [it, inserted] = index.emplace(name, out.size());
        if (inserted) out.push_back(GoldQuery{name, {}, {}});
        GoldQuery& q = out[it->second];
        if (!phrase.empty()) {
            if (q.phrase.empty()) {
                q.phrase = std::string(phrase);
            } else if (q.phrase != phrase) {
                throw validation_error("line " + std::to_string(r.line) + ": conflicting phrase for query '" +
                                       name + "'");
            }
        }
        q.entries.push_back(GoldEntry{label, scope});
    }
    for (const auto& q : out) {
        if (q.phrase.empty()) throw validation_error("query '" + q.name + "' has no phrase");
    }
    return out;
}

std::vector<GoldQuery> load_gold_sets(std::istream& in) {
    return parse_gold_sets(read_stream(in));
}

SanitizedGold sanitize_gold(std::span<const GoldQuery> gold, const Vocabulary& vocab) {
    SanitizedGold result;
    result.queries.reserve(gold.size());
    for (const auto& q : gold) {
        GoldQuery kept{q.name, q.phrase, {}};
        QuerySanitization row{q.name, 0, {}, false};
        for (const auto& e : q.entries) {
            if (vocab.lookup_exact(e.label) != nullptr) {
                kept.entries.push_back(e);
            } else {
                ++row.excluded_count;
                if (row.excluded_samples.size() < kExcludedSampleCap) row.excluded_samples.push_back(e.label);
            }
        }
        row.emptied = kept.entries.empty();
        result.report.total_excluded += row.excluded_count;
        if (row.excluded_count > 0) ++result.report.affected_queries;
        result.report.per_query.push_back(std::move(row));
        result.queries.push_back(std::move(kept));
    }
    return result;
}

}  // namespace amq
