#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amq/pipeline.hpp"
#include "amq/terminology.hpp"

namespace amq {

struct MetricsPoint {
    double cutoff = 0.0;
    std::size_t tp = 0;
    std::size_t pred_n = 0;
    std::size_t gold_n = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Precision, recall and F1 from raw counts, with 0 for each empty ratio.
MetricsPoint metrics_from_counts(double cutoff, std::size_t tp, std::size_t pred_n, std::size_t gold_n);

/// TP is the number of predicted labels found in the gold set (matched under
/// `mode`); gold_n counts distinct gold labels.
MetricsPoint metrics_at(std::span<const std::string> gold_labels, std::span<const std::string> predicted_labels,
                        double cutoff, CaseMode mode = CaseMode::Sensitive);

/// apply_cutoff then metrics_at for every grid value.
std::vector<MetricsPoint> sweep_query(const AmqResult& result, const GoldQuery& gold, std::span<const double> grid,
                                      CaseMode mode = CaseMode::Sensitive);

struct Summary {
    double mean = 0.0;
    double sd = 0.0;  // sample (n - 1)
    double min = 0.0;
    double max = 0.0;
};

struct SweepRow {
    double cutoff = 0.0;
    std::size_t n_queries = 0;
    Summary precision;
    Summary recall;
    Summary f1;
};

struct QuerySweep {
    std::string name;
    std::vector<MetricsPoint> points;
};

struct SweepSummary {
    std::vector<SweepRow> rows;
    std::vector<std::string> excluded;  // queries with gold_n = 0, by name
    bool sd_flagged = false;            // fewer than two contributing queries
};

/// Cross-query mean/SD/min/max per grid position. Queries are reduced in
/// name order, so the result does not depend on input order.
SweepSummary summarize(std::span<const QuerySweep> sweeps);

struct PerQueryBest {
    std::string name;
    double best_cutoff = 0.0;
    double max_f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    std::size_t tp = 0;
    std::size_t pred_n = 0;
    std::size_t gold_n = 0;
};

/// Argmax of F1 over the points; ties go to the lowest cut-off.
PerQueryBest best_f1(std::span<const MetricsPoint> points, std::string name = {});

/// Sample Pearson correlation; throws UndefinedCorrelation for zero variance
/// and an input error for mismatched or short inputs.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Keeps NARROW entries only.
std::vector<GoldQuery> narrow_filter(std::span<const GoldQuery> gold);

struct EvalReport {
    std::vector<double> cutoff_grid;
    std::vector<SweepRow> sweep;
    std::vector<PerQueryBest> per_query;  // max_f1 descending, then name
    std::vector<QuerySweep> sweeps;       // by name
    std::optional<double> pearson_r_maxf1_vs_goldn;
    std::vector<std::string> excluded_queries;
    bool narrow_mode = false;
    bool sd_flagged = false;
    SanitizationReport sanitization;
    std::string provider_id;
    std::string vocab_version;
};

/// Sanitize, run every gold phrase through the pipeline, sweep, summarize,
/// rank queries by best F1 and correlate best F1 with gold list size.
/// Queries run on up to `workers` threads (0 = hardware concurrency).
EvalReport evaluate(std::span<const GoldQuery> gold, const Vocabulary& vocab, const EmbeddingSet& emb,
                    const AmqConfig& config, const EmbeddingProvider& provider, bool narrow_mode,
                    std::size_t workers = 0);

// ---------------------------------------------------------------- export

nlohmann::json report_to_json(const EvalReport& report);
std::string report_json_text(const EvalReport& report);
std::string table2_csv(const EvalReport& report);
std::string table3_csv(const EvalReport& report);
std::string sanitization_csv(const EvalReport& report);

}  // namespace amq
