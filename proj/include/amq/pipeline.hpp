#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "amq/embedding.hpp"
#include "amq/relevance.hpp"
#include "amq/retrieval.hpp"
#include "amq/terminology.hpp"

namespace amq {

/// Inclusive grid from..to by step; the end point is admitted within 1e-9.
/// Values are snapped to 1e-9 so 0.5 + 8 * 0.05 prints as 0.9.
std::vector<double> make_cutoff_grid(double from, double to, double step);

/// Parses "A:B:STEP".
std::vector<double> parse_cutoff_grid(std::string_view text);

struct AmqConfig {
    double fuzzy_threshold = kDefaultFuzzyThreshold;
    CaseMode case_mode = CaseMode::Sensitive;
    std::size_t semantic_top_k = kSemanticTopK;
    double default_cutoff = 0.60;
    std::vector<double> cutoff_grid = make_cutoff_grid(0.50, 0.90, 0.05);
    ProviderConfig provider;

    void validate() const;
};

/// Reads a config document; absent keys keep their defaults.
AmqConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const AmqConfig& config);

struct StageTimings {
    std::chrono::nanoseconds retrieval{0};
    std::chrono::nanoseconds scoring{0};
    std::chrono::nanoseconds clustering{0};
    std::chrono::nanoseconds ranking{0};
};

struct AmqResult {
    std::string phrase;
    MatchOutcome match;
    std::vector<ScoredTerm> ranked;  // retained terms in rank order, no cut-off applied
    ClusterSplit split;
    StageTimings timings;
};

/// best_term_match -> score_all -> two_means_split(combined) -> mark_retained
/// -> rank_terms. Errors keep their kind and gain the stage name as context.
AmqResult run_query(std::string_view phrase, const Vocabulary& vocab, const EmbeddingSet& emb,
                    const AmqConfig& config, const EmbeddingProvider& provider);

}  // namespace amq
