#include <cstdio>

#include "amq/csv.hpp"
#include "amq/evaluation.hpp"
#include "amq/json_format.hpp"

namespace amq {

std::string format_fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

void append_json_string(std::string& out, std::string_view s) {
    out.push_back('"');
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(static_cast<unsigned char>(c)));
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
    out.push_back('"');
}

namespace {

nlohmann::json summary_json(const Summary& s) {
    return {{"mean", s.mean}, {"sd", s.sd}, {"min", s.min}, {"max", s.max}};
}

nlohmann::json point_json(const MetricsPoint& p) {
    return {{"cutoff", p.cutoff}, {"tp", p.tp},         {"pred_n", p.pred_n}, {"gold_n", p.gold_n},
            {"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

}  // namespace

nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json doc;
    doc["cutoff_grid"] = r.cutoff_grid;
    doc["excluded_queries"] = r.excluded_queries;
    doc["narrow_mode"] = r.narrow_mode;
    doc["pearson_r_maxf1_vs_goldn"] = r.pearson_r_maxf1_vs_goldn ? nlohmann::json(*r.pearson_r_maxf1_vs_goldn)
                                                                 : nlohmann::json(nullptr);
    doc["per_query"] = nlohmann::json::array();
    for (const auto& b : r.per_query) {
        doc["per_query"].push_back({{"name", b.name},
                                    {"best_cutoff", b.best_cutoff},
                                    {"max_f1", b.max_f1},
                                    {"precision", b.precision},
                                    {"recall", b.recall},
                                    {"tp", b.tp},
                                    {"pred_n", b.pred_n},
                                    {"gold_n", b.gold_n}});
    }
    nlohmann::json san;
    san["total_excluded"] = r.sanitization.total_excluded;
    san["affected_queries"] = r.sanitization.affected_queries;
    san["per_query"] = nlohmann::json::array();
    for (const auto& q : r.sanitization.per_query) {
        san["per_query"].push_back({{"name", q.name},
                                    {"excluded_count", q.excluded_count},
                                    {"excluded_samples", q.excluded_samples},
                                    {"emptied", q.emptied}});
    }
    doc["sanitization"] = san;
    doc["sd_flagged"] = r.sd_flagged;
    doc["sd_kind"] = "sample";
    doc["sweep"] = nlohmann::json::array();
    for (const auto& row : r.sweep) {
        doc["sweep"].push_back({{"cutoff", row.cutoff},
                                {"n_queries", row.n_queries},
                                {"precision", summary_json(row.precision)},
                                {"recall", summary_json(row.recall)},
                                {"f1", summary_json(row.f1)}});
    }
    doc["sweeps"] = nlohmann::json::array();
    for (const auto& q : r.sweeps) {
        nlohmann::json points = nlohmann::json::array();
        for (const auto& p : q.points) points.push_back(point_json(p));
        doc["sweeps"].push_back({{"name", q.name}, {"points", points}});
    }
    doc["provider_id"] = r.provider_id;
    doc["vocab_version"] = r.vocab_version;
    return doc;
}

std::string report_json_text(const EvalReport& report) {
    return dump_fixed(report_to_json(report)) + "\n";
}

std::string table2_csv(const EvalReport& report) {
    std::vector<std::string> header{"cutoff", "n_queries"};
    for (const char* metric : {"precision", "recall", "f1"}) {
        for (const char* stat : {"mean", "sd", "min", "max"}) header.push_back(std::string(metric) + "_" + stat);
    }
    std::string out = csv::join_row(header);
    for (const auto& row : report.sweep) {
        std::vector<std::string> f{format_fixed4(row.cutoff), std::to_string(row.n_queries)};
        for (const Summary* s : {&row.precision, &row.recall, &row.f1}) {
            for (double v : {s->mean, s->sd, s->min, s->max}) f.push_back(format_fixed4(v));
        }
        out += csv::join_row(f);
    }
    return out;
}

std::string table3_csv(const EvalReport& report) {
    std::string out =
        csv::join_row({"query", "best_cutoff", "max_f1", "precision", "recall", "tp", "pred_n", "gold_n"});
    for (const auto& b : report.per_query) {
        out += csv::join_row({b.name, format_fixed4(b.best_cutoff), format_fixed4(b.max_f1),
                              format_fixed4(b.precision), format_fixed4(b.recall), std::to_string(b.tp),
                              std::to_string(b.pred_n), std::to_string(b.gold_n)});
    }
    return out;
}

std::string sanitization_csv(const EvalReport& report) {
    std::string out = csv::join_row({"query", "excluded_count", "excluded_samples", "emptied"});
    for (const auto& q : report.sanitization.per_query) {
        std::string samples;
        for (const auto& s : q.excluded_samples) samples += (samples.empty() ? "" : "; ") + s;
        out += csv::join_row({q.name, std::to_string(q.excluded_count), samples, q.emptied ? "Y" : "N"});
    }
    return out;
}

}  // namespace amq
