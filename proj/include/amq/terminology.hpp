#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace amq {

enum class TermLevel { PT, LLT, OTHER };
enum class CaseMode { Sensitive, Insensitive };

std::string_view to_string(TermLevel level) noexcept;
std::string_view to_string(CaseMode mode) noexcept;
CaseMode case_mode_from_string(std::string_view s);

/// Key under which a label is compared in the given case mode.
std::string label_key(std::string_view label, CaseMode mode);

struct Term {
    std::string code;
    std::string label;
    TermLevel level = TermLevel::PT;
    bool current = true;

    bool is_current_pt() const noexcept { return level == TermLevel::PT && current; }
    friend bool operator==(const Term&, const Term&) = default;
};

/// Controlled vocabulary with an exact-label index over current PTs.
/// Immutable after construction.
class Vocabulary {
public:
    Vocabulary() = default;

    /// Validates code uniqueness and current-PT label uniqueness (under
    /// `mode`); throws a validation error otherwise.
    Vocabulary(std::string version, std::vector<Term> terms, CaseMode mode = CaseMode::Sensitive);

    // Copies rebuild the indexes, which hold pointers into terms_.
    Vocabulary(const Vocabulary& other);
    Vocabulary& operator=(const Vocabulary& other);
    Vocabulary(Vocabulary&&) noexcept = default;
    Vocabulary& operator=(Vocabulary&&) noexcept = default;

    const std::string& version() const noexcept { return version_; }
    CaseMode case_mode() const noexcept { return mode_; }
    std::span<const Term> terms() const noexcept { return terms_; }

    /// Current PTs in file order.
    const std::vector<const Term*>& current_pts() const noexcept { return current_pts_; }
    std::size_t pt_count() const noexcept { return current_pts_.size(); }

    /// Current PT whose label matches under the case mode, or nullptr.
    const Term* lookup_exact(std::string_view label) const;
    const Term* find_code(std::string_view code) const;

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
        return a.version_ == b.version_ && a.mode_ == b.mode_ && a.terms_ == b.terms_;
    }

private:
    void build_indexes();

    std::string version_;
    CaseMode mode_ = CaseMode::Sensitive;
    std::vector<Term> terms_;
    std::vector<const Term*> current_pts_;
    std::unordered_map<std::string, std::size_t> label_index_;
    std::unordered_map<std::string, std::size_t> code_index_;

};

inline constexpr std::string_view kDefaultVocabVersion = "unversioned";

/// Reads `code,label,level,current` CSV.
Vocabulary parse_vocabulary(std::string_view text, CaseMode mode = CaseMode::Sensitive,
                            std::string version = std::string(kDefaultVocabVersion));
Vocabulary load_vocabulary(std::istream& in, CaseMode mode = CaseMode::Sensitive,
                           std::string version = std::string(kDefaultVocabVersion));

// ---------------------------------------------------------------- gold sets

enum class Scope { Narrow, Broad };
std::string_view to_string(Scope scope) noexcept;

struct GoldEntry {
    std::string label;
    Scope scope = Scope::Broad;
    friend bool operator==(const GoldEntry&, const GoldEntry&) = default;
};

struct GoldQuery {
    std::string name;
    std::string phrase;
    std::vector<GoldEntry> entries;
    friend bool operator==(const GoldQuery&, const GoldQuery&) = default;
};

/// Reads `query_name,query_phrase,term_label[,scope]` CSV. Rows sharing a
/// name are grouped (first-appearance order); a missing scope is BROAD.
std::vector<GoldQuery> parse_gold_sets(std::string_view text);
std::vector<GoldQuery> load_gold_sets(std::istream& in);

inline constexpr std::size_t kExcludedSampleCap = 5;

struct QuerySanitization {
    std::string name;
    std::size_t excluded_count = 0;
    std::vector<std::string> excluded_samples;  // first kExcludedSampleCap
    bool emptied = false;                        // nothing survived
};

struct SanitizationReport {
    std::vector<QuerySanitization> per_query;
    std::size_t total_excluded = 0;
    std::size_t affected_queries = 0;
};

struct SanitizedGold {
    std::vector<GoldQuery> queries;
    SanitizationReport report;
};

/// Keeps entries that resolve to a current PT; queries left empty stay in
/// the output and are flagged.
SanitizedGold sanitize_gold(std::span<const GoldQuery> gold, const Vocabulary& vocab);

std::string read_stream(std::istream& in);

}  // namespace amq
