#include "amq/retrieval.hpp"

#include <algorithm>
#include <numeric>

#include "amq/error.hpp"
#include "amq/text.hpp"

namespace amq {

std::string_view to_string(MatchMethod m) noexcept {
    return m == MatchMethod::Lexical ? "LEXICAL" : "SEMANTIC";
}

namespace {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> row(b.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

double fuzzy_decoded(const std::u32string& a, const std::u32string& b) {
    const std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

std::u32string decode_for(std::string_view s, CaseMode mode) {
    return utf8_decode(mode == CaseMode::Sensitive ? std::string(s) : ascii_lower(s));
}

// score descending, then label ascending
bool ranks_before(double sa, const std::string& la, double sb, const std::string& lb) {
    if (sa != sb) return sa > sb;
    return la < lb;
}

}  // namespace

double fuzzy_similarity(std::string_view a, std::string_view b, CaseMode mode) {
    return fuzzy_decoded(decode_for(a, mode), decode_for(b, mode));
}

Vector composite_embedding(std::span<const Vector> vectors) {
    if (vectors.empty()) throw input_error("composite_embedding of an empty list");
    if (vectors.size() == 1) return vectors.front();
    const std::size_t dims = vectors.front().dims();
    std::vector<double> mean(dims, 0.0);
    for (const auto& v : vectors) {
        if (v.dims() != dims) throw input_error("composite_embedding: dimension mismatch");
    }
    for (std::size_t i = 0; i < dims; ++i) {
        double s = 0.0;
        for (const auto& v : vectors) s += v.components()[i];
        mean[i] = s / static_cast<double>(vectors.size());
    }
    return normalize(mean);
}

MatchOutcome best_term_match(std::string_view phrase, const Vocabulary& vocab, const EmbeddingSet& emb,
                             const EmbeddingProvider& provider, double fuzzy_threshold) {
    if (trim(phrase).empty()) throw input_error("empty query phrase");
    const auto& pts = vocab.current_pts();
    if (pts.empty()) throw input_error("vocabulary has no current PTs");

    MatchOutcome out;
    out.query_vector = embed_text(provider, phrase);
    if (out.query_vector.dims() != emb.dims()) {
        throw input_error("query vector dims " + std::to_string(out.query_vector.dims()) +
                          " differ from embedding set dims " + std::to_string(emb.dims()));
    }

    const std::u32string query = decode_for(phrase, vocab.case_mode());
    const Term* best = nullptr;
    double best_score = -1.0;
    for (const Term* t : pts) {
        const double s = fuzzy_decoded(query, decode_for(t->label, vocab.case_mode()));
        if (best == nullptr || ranks_before(s, t->label, best_score, best->label)) {
            best = t;
            best_score = s;
        }
    }
    if (best_score > fuzzy_threshold) {
        out.method = MatchMethod::Lexical;
        out.matched.push_back({best->code, best->label, best_score});
        out.best_vector = emb.at(best->code);
        return out;
    }

    struct Candidate {
        const Term* term;
        double score;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(pts.size());
    for (const Term* t : pts) candidates.push_back({t, cosine(out.query_vector, emb.at(t->code))});
    const std::size_t k = std::min(kSemanticTopK, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end(),
                      [](const Candidate& a, const Candidate& b) {
                          return ranks_before(a.score, a.term->label, b.score, b.term->label);
                      });

    out.method = MatchMethod::Semantic;
    std::vector<Vector> chosen;
    for (std::size_t i = 0; i < k; ++i) {
        out.matched.push_back({candidates[i].term->code, candidates[i].term->label, candidates[i].score});
        chosen.push_back(emb.at(candidates[i].term->code));
    }
    out.best_vector = composite_embedding(chosen);
    out.degenerate = out.best_vector.is_zero();
    return out;
}

}  // namespace amq
