#pragma once

#include <span>
#include <string>
#include <vector>

#include "amq/embedding.hpp"
#include "amq/terminology.hpp"

namespace amq {

struct ScoredTerm {
    std::string code;
    std::string label;
    double sim_query = 0.0;  // cosine to the query vector
    double sim_best = 0.0;   // cosine to the best-match (or composite) vector
    double combined = 0.0;   // (sim_query + sim_best) / 2
    bool retained = false;

    friend bool operator==(const ScoredTerm&, const ScoredTerm&) = default;
};

struct ClusterSplit {
    double split_value = 0.0;  // smallest score in the high group
    std::size_t low_count = 0;
    std::size_t high_count = 0;
    double sse = 0.0;
};

/// Which split wins when two candidate SSEs are within kSseTieTolerance.
enum class SplitTiePreference { SmallerHighGroup, LargerHighGroup };

inline constexpr double kSseTieTolerance = 1e-12;
inline constexpr double kDegenerateSpread = 1e-12;

/// One entry per current PT in vocabulary order, retained = false.
std::vector<ScoredTerm> score_all(const Vector& query_vector, const Vector& best_vector, const EmbeddingSet& emb,
                                  const Vocabulary& vocab);

/// Exact 1-D two-means. Scores are sorted and every boundary between two
/// distinct values is tried; the split with minimal total within-group SSE
/// wins. A single value, or a spread of at most kDegenerateSpread, puts
/// everything in the high group.
ClusterSplit two_means_split(std::span<const double> scores,
                             SplitTiePreference tie = SplitTiePreference::SmallerHighGroup);

/// retained = combined >= split_value, or the code is one of the best matches.
std::vector<ScoredTerm> mark_retained(std::vector<ScoredTerm> terms, const ClusterSplit& split,
                                      std::span<const std::string> best_codes);

/// Retained terms only, sim_best descending, ties by label ascending.
std::vector<ScoredTerm> rank_terms(std::span<const ScoredTerm> terms);

/// Keeps the terms with sim_best >= cutoff, preserving order.
std::vector<ScoredTerm> apply_cutoff(std::span<const ScoredTerm> ranked, double cutoff);

}  // namespace amq
