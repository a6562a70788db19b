#include "amq/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "amq/error.hpp"

namespace amq {

MetricsPoint metrics_from_counts(double cutoff, std::size_t tp, std::size_t pred_n, std::size_t gold_n) {
    MetricsPoint p{cutoff, tp, pred_n, gold_n, 0.0, 0.0, 0.0};
    p.precision = pred_n ? static_cast<double>(tp) / static_cast<double>(pred_n) : 0.0;
    p.recall = gold_n ? static_cast<double>(tp) / static_cast<double>(gold_n) : 0.0;
    p.f1 = p.precision + p.recall > 0.0 ? 2.0 * p.precision * p.recall / (p.precision + p.recall) : 0.0;
    return p;
}

MetricsPoint metrics_at(std::span<const std::string> gold_labels, std::span<const std::string> predicted_labels,
                        double cutoff, CaseMode mode) {
    std::unordered_set<std::string> gold;
    for (const auto& g : gold_labels) gold.insert(label_key(g, mode));
    std::unordered_set<std::string> seen;
    std::size_t tp = 0;
    for (const auto& p : predicted_labels) {
        const auto key = label_key(p, mode);
        if (gold.contains(key) && seen.insert(key).second) ++tp;
    }
    return metrics_from_counts(cutoff, tp, predicted_labels.size(), gold.size());
}

std::vector<MetricsPoint> sweep_query(const AmqResult& result, const GoldQuery& gold, std::span<const double> grid,
                                      CaseMode mode) {
    std::vector<std::string> gold_labels;
    gold_labels.reserve(gold.entries.size());
    for (const auto& e : gold.entries) gold_labels.push_back(e.label);

    std::vector<MetricsPoint> points;
    points.reserve(grid.size());
    for (double t : grid) {
        std::vector<std::string> predicted;
        for (const auto& s : apply_cutoff(result.ranked, t)) predicted.push_back(s.label);
        points.push_back(metrics_at(gold_labels, predicted, t, mode));
    }
    return points;
}

namespace {

Summary summarize_values(const std::vector<double>& xs) {
    Summary s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() >= 2) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    s.min = *std::min_element(xs.begin(), xs.end());
    s.max = *std::max_element(xs.begin(), xs.end());
    return s;
}

std::vector<const QuerySweep*> by_name(std::span<const QuerySweep> sweeps) {
    std::vector<const QuerySweep*> ordered;
    for (const auto& q : sweeps) ordered.push_back(&q);
    std::sort(ordered.begin(), ordered.end(), [](const QuerySweep* a, const QuerySweep* b) { return a->name < b->name; });
    return ordered;
}

}  // namespace

SweepSummary summarize(std::span<const QuerySweep> sweeps) {
    SweepSummary out;
    std::vector<const QuerySweep*> included;
    std::size_t grid_size = 0;
    for (const QuerySweep* q : by_name(sweeps)) {
        if (q->points.empty()) throw input_error("query '" + q->name + "' has no sweep points");
        if (grid_size == 0) grid_size = q->points.size();
        if (q->points.size() != grid_size) throw input_error("query '" + q->name + "' does not cover the full grid");
        if (q->points.front().gold_n == 0) {
            out.excluded.push_back(q->name);
        } else {
            included.push_back(q);
        }
    }
    out.sd_flagged = included.size() < 2;
    if (included.empty()) return out;

    for (std::size_t i = 0; i < grid_size; ++i) {
        std::vector<double> p, r, f;
        for (const QuerySweep* q : included) {
            p.push_back(q->points[i].precision);
            r.push_back(q->points[i].recall);
            f.push_back(q->points[i].f1);
        }
        out.rows.push_back(SweepRow{included.front()->points[i].cutoff, included.size(), summarize_values(p),
                                    summarize_values(r), summarize_values(f)});
    }
    return out;
}

PerQueryBest best_f1(std::span<const MetricsPoint> points, std::string name) {
    if (points.empty()) throw input_error("best_f1 over an empty sweep");
    const MetricsPoint* best = &points.front();
    for (const auto& p : points) {
        if (p.f1 > best->f1) best = &p;
    }
    return PerQueryBest{std::move(name), best->cutoff, best->f1, best->precision, best->recall,
                        best->tp,        best->pred_n, best->gold_n};
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw input_error("pearson: length mismatch");
    if (xs.size() < 2) throw input_error("pearson: need at least two points");
    // Extended-precision accumulation: a double result is then within half an
    // ulp, which keeps perfectly linear data at exactly +/-1.
    const auto n = static_cast<long double>(xs.size());
    long double mx = 0.0L, my = 0.0L;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    long double sxy = 0.0L, sxx = 0.0L, syy = 0.0L;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const long double dx = xs[i] - mx;
        const long double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0L || syy == 0.0L) throw Error(ErrorKind::UndefinedCorrelation, "pearson: zero variance");
    return std::clamp(static_cast<double>(sxy / std::sqrt(sxx * syy)), -1.0, 1.0);
}

std::vector<GoldQuery> narrow_filter(std::span<const GoldQuery> gold) {
    std::vector<GoldQuery> out;
    out.reserve(gold.size());
    for (const auto& q : gold) {
        GoldQuery n{q.name, q.phrase, {}};
        std::copy_if(q.entries.begin(), q.entries.end(), std::back_inserter(n.entries),
                     [](const GoldEntry& e) { return e.scope == Scope::Narrow; });
        out.push_back(std::move(n));
    }
    return out;
}

EvalReport evaluate(std::span<const GoldQuery> gold, const Vocabulary& vocab, const EmbeddingSet& emb,
                    const AmqConfig& config, const EmbeddingProvider& provider, bool narrow_mode,
                    std::size_t workers) {
    config.validate();
    EvalReport report;
    report.cutoff_grid = config.cutoff_grid;
    report.narrow_mode = narrow_mode;
    report.provider_id = emb.provider_id();
    report.vocab_version = vocab.version();

    auto sanitized = sanitize_gold(gold, vocab);
    report.sanitization = std::move(sanitized.report);
    std::vector<GoldQuery> queries = narrow_mode ? narrow_filter(sanitized.queries) : std::move(sanitized.queries);

    std::vector<QuerySweep> sweeps(queries.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < queries.size(); i = next++) {
            try {
                const auto result = run_query(queries[i].phrase, vocab, emb, config, provider);
                sweeps[i] = QuerySweep{queries[i].name, sweep_query(result, queries[i], config.cutoff_grid,
                                                                    vocab.case_mode())};
            } catch (const Error& e) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::make_exception_ptr(e.with_context("query '" + queries[i].name + "'"));
                next = queries.size();
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = queries.size();
            }
        }
    };
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(1, queries.size()));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
    }
    if (failure) std::rethrow_exception(failure);

    std::sort(sweeps.begin(), sweeps.end(), [](const QuerySweep& a, const QuerySweep& b) { return a.name < b.name; });
    auto summary = summarize(sweeps);
    report.sweep = std::move(summary.rows);
    report.excluded_queries = std::move(summary.excluded);
    report.sd_flagged = summary.sd_flagged;

    std::vector<double> xs, ys;
    for (const auto& q : sweeps) {
        if (q.points.front().gold_n == 0) continue;
        report.per_query.push_back(best_f1(q.points, q.name));
        xs.push_back(report.per_query.back().max_f1);
        ys.push_back(static_cast<double>(report.per_query.back().gold_n));
    }
    if (xs.size() >= 2) {
        try {
            report.pearson_r_maxf1_vs_goldn = pearson(xs, ys);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::UndefinedCorrelation) throw;
        }
    }
    std::sort(report.per_query.begin(), report.per_query.end(), [](const PerQueryBest& a, const PerQueryBest& b) {
        if (a.max_f1 != b.max_f1) return a.max_f1 > b.max_f1;
        return a.name < b.name;
    });
    report.sweeps = std::move(sweeps);
    return report;
}

}  // namespace amq
