#include "amq/relevance.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

#include "amq/error.hpp"

namespace amq {

std::vector<ScoredTerm> score_all(const Vector& query_vector, const Vector& best_vector, const EmbeddingSet& emb,
                                  const Vocabulary& vocab) {
    if (query_vector.dims() != emb.dims() || best_vector.dims() != emb.dims()) {
        throw input_error("score_all: vector dims do not match the embedding set");
    }
    std::vector<ScoredTerm> out;
    out.reserve(vocab.pt_count());
    for (const Term* t : vocab.current_pts()) {
        const Vector& v = emb.at(t->code);
        ScoredTerm s{t->code, t->label, cosine(v, query_vector), cosine(v, best_vector), 0.0, false};
        s.combined = (s.sim_query + s.sim_best) / 2.0;
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

double direct_sse(std::span<const double> xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double sse = 0.0;
    for (double x : xs) sse += (x - mean) * (x - mean);
    return sse;
}

}  // namespace

ClusterSplit two_means_split(std::span<const double> scores, SplitTiePreference tie) {
    if (scores.empty()) throw input_error("two_means_split of an empty list");
    std::vector<double> s(scores.begin(), scores.end());
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    if (n == 1 || s.back() - s.front() <= kDegenerateSpread) {
        return ClusterSplit{s.front(), 0, n, direct_sse(s)};
    }

    // Prefix sums of values centred on the overall mean keep the
    // sum-of-squares identity well conditioned.
    double centre = 0.0;
    for (double x : s) centre += x;
    centre /= static_cast<double>(n);
    std::vector<double> p1(n + 1, 0.0), p2(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = s[i] - centre;
        p1[i + 1] = p1[i] + d;
        p2[i + 1] = p2[i] + d * d;
    }
    auto group_sse = [&](std::size_t lo, std::size_t hi) {
        const double m = static_cast<double>(hi - lo);
        const double a = p1[hi] - p1[lo];
        return std::max(0.0, (p2[hi] - p2[lo]) - a * a / m);
    };

    std::vector<std::pair<std::size_t, double>> candidates;  // (low_count, sse)
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < n; ++k) {
        if (!(s[k - 1] < s[k])) continue;
        const double sse = group_sse(0, k) + group_sse(k, n);
        candidates.emplace_back(k, sse);
        best = std::min(best, sse);
    }
    std::size_t chosen = 0;
    for (const auto& [k, sse] : candidates) {
        if (sse > best + kSseTieTolerance) continue;
        if (chosen == 0) {
            chosen = k;
        } else if (tie == SplitTiePreference::SmallerHighGroup) {
            chosen = std::max(chosen, k);
        } else {
            chosen = std::min(chosen, k);
        }
    }
    const std::span<const double> all(s);
    return ClusterSplit{s[chosen], chosen, n - chosen, direct_sse(all.first(chosen)) + direct_sse(all.subspan(chosen))};
}

std::vector<ScoredTerm> mark_retained(std::vector<ScoredTerm> terms, const ClusterSplit& split,
                                      std::span<const std::string> best_codes) {
    const std::unordered_set<std::string> forced(best_codes.begin(), best_codes.end());
    for (auto& t : terms) t.retained = t.combined >= split.split_value || forced.contains(t.code);
    return terms;
}

std::vector<ScoredTerm> rank_terms(std::span<const ScoredTerm> terms) {
    std::vector<ScoredTerm> out;
    std::copy_if(terms.begin(), terms.end(), std::back_inserter(out), [](const ScoredTerm& t) { return t.retained; });
    std::sort(out.begin(), out.end(), [](const ScoredTerm& a, const ScoredTerm& b) {
        if (a.sim_best != b.sim_best) return a.sim_best > b.sim_best;
        return a.label < b.label;
    });
    return out;
}

std::vector<ScoredTerm> apply_cutoff(std::span<const ScoredTerm> ranked, double cutoff) {
    std::vector<ScoredTerm> out;
    std::copy_if(ranked.begin(), ranked.end(), std::back_inserter(out),
                 [cutoff](const ScoredTerm& t) { return t.sim_best >= cutoff; });
    return out;
}

}  // namespace amq
