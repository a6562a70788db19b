#include "amq/service.hpp"

#include <httplib.h>

#include "amq/error.hpp"
#include "amq/evaluation.hpp"
#include "amq/json_format.hpp"
#include "amq/text.hpp"

namespace amq {

namespace {

HttpResponse json_response(int status, const nlohmann::ordered_json& doc) {
    return HttpResponse{status, dump_fixed(doc) + "\n", "application/json"};
}

HttpResponse error_response(int status, std::string_view code, std::string_view message,
                            std::optional<std::size_t> line = std::nullopt) {
    nlohmann::ordered_json doc;
    doc["error"] = code;
    doc["message"] = message;
    if (line) doc["line"] = *line;
    return json_response(status, doc);
}

HttpResponse error_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Provider: return error_response(502, "provider_error", e.what());
        case ErrorKind::Parse: return error_response(400, "parse_error", e.what(), e.line());
        case ErrorKind::Validation: return error_response(400, "validation_error", e.what());
        case ErrorKind::Input: return error_response(400, "invalid_input", e.what());
        default: return error_response(500, "internal_error", e.what());
    }
}

std::optional<nlohmann::json> parse_body(std::string_view body) {
    try {
        auto doc = nlohmann::json::parse(body);
        if (doc.is_object()) return doc;
    } catch (const nlohmann::json::exception&) {
    }
    return std::nullopt;
}

}  // namespace

nlohmann::ordered_json query_response_json(const AmqResult& result, double cutoff,
                                           std::optional<std::size_t> max_terms) {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json match;
    match["method"] = to_string(result.match.method);
    match["matched"] = nlohmann::ordered_json::array();
    for (const auto& m : result.match.matched) {
        nlohmann::ordered_json t;
        t["code"] = m.code;
        t["label"] = m.label;
        t["score"] = m.score;
        match["matched"].push_back(std::move(t));
    }
    doc["match"] = std::move(match);

    auto kept = apply_cutoff(result.ranked, cutoff);
    if (max_terms && kept.size() > *max_terms) kept.resize(*max_terms);
    doc["terms"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < kept.size(); ++i) {
        nlohmann::ordered_json t;
        t["code"] = kept[i].code;
        t["label"] = kept[i].label;
        t["sim_query"] = kept[i].sim_query;
        t["sim_best"] = kept[i].sim_best;
        t["combined"] = kept[i].combined;
        t["rank"] = i + 1;
        doc["terms"].push_back(std::move(t));
    }
    doc["split_value"] = result.split.split_value;
    doc["total_retained"] = result.ranked.size();
    return doc;
}

Service::Service(ServiceState state)
    : state_(std::move(state)), provider_(make_provider(state_.config.provider)) {
    state_.config.validate();
    if (!state_.emb.covers_exactly(state_.vocab)) {
        throw validation_error("embedding set does not cover the vocabulary's current PTs");
    }
    if (provider_->id() != state_.emb.provider_id()) {
        throw validation_error("embedding set was built by '" + state_.emb.provider_id() +
                               "' but the configured provider is '" + provider_->id() + "'");
    }
}

HttpResponse Service::handle_query(std::string_view body) const {
    const auto doc = parse_body(body);
    if (!doc) return error_response(400, "invalid_json", "request body must be a JSON object");
    if (!doc->contains("phrase") || !(*doc)["phrase"].is_string()) {
        return error_response(400, "missing_phrase", "'phrase' is required");
    }
    const auto& phrase = (*doc)["phrase"].get_ref<const std::string&>();
    if (phrase.size() > kMaxPhraseBytes) {
        return error_response(413, "phrase_too_long",
                              "phrase exceeds " + std::to_string(kMaxPhraseBytes) + " bytes");
    }
    if (amq::trim(phrase).empty()) return error_response(400, "missing_phrase", "'phrase' is empty");

    double cutoff = state_.config.default_cutoff;
    if (doc->contains("cutoff")) {
        if (!(*doc)["cutoff"].is_number()) return error_response(400, "invalid_cutoff", "'cutoff' must be a number");
        cutoff = (*doc)["cutoff"].get<double>();
    }
    std::optional<std::size_t> max_terms;
    if (doc->contains("max_terms")) {
        const auto& m = (*doc)["max_terms"];
        if (!m.is_number_integer() || m.get<std::int64_t>() < 0) {
            return error_response(400, "invalid_max_terms", "'max_terms' must be a non-negative integer");
        }
        max_terms = m.get<std::size_t>();
    }

    try {
        const auto result = run_query(phrase, state_.vocab, state_.emb, state_.config, *provider_);
        return json_response(200, query_response_json(result, cutoff, max_terms));
    } catch (const Error& e) {
        return error_for(e);
    }
}

HttpResponse Service::handle_evaluate(std::string_view body) const {
    const auto doc = parse_body(body);
    if (!doc) return error_response(400, "invalid_json", "request body must be a JSON object");
    if (!doc->contains("gold_csv") || !(*doc)["gold_csv"].is_string()) {
        return error_response(400, "missing_gold_csv", "'gold_csv' is required");
    }
    AmqConfig config = state_.config;
    bool narrow = false;
    try {
        if (doc->contains("narrow_mode")) narrow = (*doc)["narrow_mode"].get<bool>();
        if (doc->contains("cutoffs")) {
            const auto& c = (*doc)["cutoffs"];
            config.cutoff_grid = c.is_string() ? parse_cutoff_grid(c.get<std::string>()) : c.get<std::vector<double>>();
        }
        config.validate();
    } catch (const nlohmann::json::exception& e) {
        return error_response(400, "invalid_request", e.what());
    } catch (const Error& e) {
        return error_for(e);
    }

    try {
        const auto gold = parse_gold_sets((*doc)["gold_csv"].get_ref<const std::string&>());
        if (gold.size() > kMaxSyncEvaluateQueries) {
            return error_response(422, "too_many_queries",
                                  std::to_string(gold.size()) + " gold queries exceed the synchronous limit of " +
                                      std::to_string(kMaxSyncEvaluateQueries) + "; use `amq evaluate` instead");
        }
        const auto report = evaluate(gold, state_.vocab, state_.emb, config, *provider_, narrow);
        return HttpResponse{200, report_json_text(report), "application/json"};
    } catch (const Error& e) {
        return error_for(e);
    }
}

HttpResponse Service::handle_info() const {
    nlohmann::ordered_json doc;
    doc["vocab_version"] = state_.vocab.version();
    doc["term_count"] = state_.vocab.pt_count();
    doc["provider_id"] = state_.emb.provider_id();
    doc["dims"] = state_.emb.dims();
    doc["default_cutoff"] = state_.config.default_cutoff;
    doc["cutoff_grid"] = state_.config.cutoff_grid;
    doc["build_info"] = state_.build_info;
    return json_response(200, doc);
}

std::unique_ptr<httplib::Server> make_server(const Service& service, const ServerOptions& options) {
    auto server = std::make_unique<httplib::Server>();
    auto send = [](httplib::Response& res, const HttpResponse& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    server->Post("/api/query", [&service, send](const httplib::Request& req, httplib::Response& res) {
        send(res, service.handle_query(req.body));
    });
    server->Post("/api/evaluate", [&service, send](const httplib::Request& req, httplib::Response& res) {
        send(res, service.handle_evaluate(req.body));
    });
    server->Get("/api/info", [&service, send](const httplib::Request&, httplib::Response& res) {
        send(res, service.handle_info());
    });
    server->Get("/health", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });

    if (!options.cors_origin.empty()) {
        const std::string origin = options.cors_origin;
        server->set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Origin", origin);
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
        });
        server->Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    }
    return server;
}

}  // namespace amq
