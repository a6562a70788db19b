#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amq/embedding.hpp"
#include "amq/terminology.hpp"

namespace amq {

/// 1 - levenshtein(a, b) / max(len a, len b) over code points; 1.0 when both
/// are empty. Insensitive mode compares ASCII-lowercased strings.
double fuzzy_similarity(std::string_view a, std::string_view b, CaseMode mode = CaseMode::Sensitive);

enum class MatchMethod { Lexical, Semantic };
std::string_view to_string(MatchMethod m) noexcept;

struct MatchedTerm {
    std::string code;
    std::string label;
    double score = 0.0;  // fuzzy similarity (lexical) or cosine to the query (semantic)
};

struct MatchOutcome {
    MatchMethod method = MatchMethod::Lexical;
    std::vector<MatchedTerm> matched;  // 1..3, score descending
    Vector query_vector;
    Vector best_vector;
    bool degenerate = false;  // composite collapsed to the zero vector
};

inline constexpr double kDefaultFuzzyThreshold = 0.90;
inline constexpr std::size_t kSemanticTopK = 3;

/// Mean of the inputs, L2-normalized. A single input is returned unchanged;
/// a zero mean gives the zero vector.
Vector composite_embedding(std::span<const Vector> vectors);

/// Best-term stage. A fuzzy hit strictly above `fuzzy_threshold` wins
/// outright; otherwise the top three PTs by cosine to the embedded phrase
/// are averaged into a composite. Ties go to the smaller label (byte order).
/// The phrase is embedded on both paths.
MatchOutcome best_term_match(std::string_view phrase, const Vocabulary& vocab, const EmbeddingSet& emb,
                             const EmbeddingProvider& provider, double fuzzy_threshold = kDefaultFuzzyThreshold);

}  // namespace amq
