#include "amq/pipeline.hpp"

#include <cmath>
#include <charconv>

#include "amq/error.hpp"
#include "amq/text.hpp"

namespace amq {

std::vector<double> make_cutoff_grid(double from, double to, double step) {
    if (!(step > 0.0)) throw input_error("cutoff grid step must be positive");
    if (to < from) throw input_error("cutoff grid end is below its start");
    const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
    std::vector<double> grid;
    grid.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        grid.push_back(std::round((from + static_cast<double>(i) * step) * 1e9) / 1e9);
    }
    return grid;
}

namespace {

double parse_double(std::string_view raw, std::string_view what) {
    const std::string_view s = trim(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw parse_error(1, "invalid " + std::string(what) + " '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

std::vector<double> parse_cutoff_grid(std::string_view text) {
    const auto a = text.find(':');
    const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
    if (b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos) {
        throw parse_error(1, "cutoff grid must look like A:B:STEP, got '" + std::string(text) + "'");
    }
    return make_cutoff_grid(parse_double(text.substr(0, a), "grid start"),
                            parse_double(text.substr(a + 1, b - a - 1), "grid end"),
                            parse_double(text.substr(b + 1), "grid step"));
}

void AmqConfig::validate() const {
    if (!(fuzzy_threshold > 0.0 && fuzzy_threshold <= 1.0)) throw input_error("fuzzy_threshold must be in (0, 1]");
    if (semantic_top_k != kSemanticTopK) throw input_error("semantic_top_k is fixed at 3");
    if (!(default_cutoff >= 0.0 && default_cutoff <= 1.0)) throw input_error("default_cutoff must be in [0, 1]");
    if (cutoff_grid.empty()) throw input_error("cutoff_grid is empty");
    for (std::size_t i = 0; i < cutoff_grid.size(); ++i) {
        if (!(cutoff_grid[i] > 0.0 && cutoff_grid[i] <= 1.0)) throw input_error("cutoff_grid values must be in (0, 1]");
        if (i > 0 && !(cutoff_grid[i] > cutoff_grid[i - 1])) throw input_error("cutoff_grid must be strictly increasing");
    }
    provider.validate();
}

AmqConfig config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw parse_error(1, "config must be a JSON object");
    AmqConfig cfg;
    try {
        if (doc.contains("fuzzy_threshold")) cfg.fuzzy_threshold = doc.at("fuzzy_threshold").get<double>();
        if (doc.contains("case_mode")) cfg.case_mode = case_mode_from_string(doc.at("case_mode").get<std::string>());
        if (doc.contains("semantic_top_k")) cfg.semantic_top_k = doc.at("semantic_top_k").get<std::size_t>();
        if (doc.contains("default_cutoff")) cfg.default_cutoff = doc.at("default_cutoff").get<double>();
        if (doc.contains("cutoff_grid")) {
            const auto& g = doc.at("cutoff_grid");
            cfg.cutoff_grid = g.is_string() ? parse_cutoff_grid(g.get<std::string>()) : g.get<std::vector<double>>();
        }
        if (doc.contains("provider")) {
            const auto& p = doc.at("provider");
            const std::string kind = p.value("kind", std::string("LEXICAL_HASH"));
            if (kind == "LEXICAL_HASH") {
                cfg.provider.kind = ProviderKind::LexicalHash;
            } else if (kind == "HTTP_API") {
                cfg.provider.kind = ProviderKind::HttpApi;
            } else {
                throw input_error("unknown provider kind '" + kind + "'");
            }
            cfg.provider.dims = p.value("dims", cfg.provider.dims);
            cfg.provider.endpoint = p.value("endpoint", std::string());
            cfg.provider.model_name = p.value("model_name", std::string());
            cfg.provider.auth_token_env_var = p.value("auth_token_env_var", std::string());
            cfg.provider.batch_size = p.value("batch_size", cfg.provider.batch_size);
            cfg.provider.timeout = std::chrono::milliseconds(p.value("timeout_ms", cfg.provider.timeout.count()));
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(1, std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

nlohmann::json config_to_json(const AmqConfig& config) {
    nlohmann::json provider = {{"kind", config.provider.kind == ProviderKind::LexicalHash ? "LEXICAL_HASH" : "HTTP_API"}};
    if (config.provider.kind == ProviderKind::LexicalHash) {
        provider["dims"] = config.provider.dims;
    } else {
        provider["endpoint"] = config.provider.endpoint;
        provider["model_name"] = config.provider.model_name;
        provider["auth_token_env_var"] = config.provider.auth_token_env_var;
        provider["batch_size"] = config.provider.batch_size;
        provider["timeout_ms"] = config.provider.timeout.count();
    }
    return {
        {"fuzzy_threshold", config.fuzzy_threshold},
        {"case_mode", std::string(to_string(config.case_mode))},
        {"semantic_top_k", config.semantic_top_k},
        {"default_cutoff", config.default_cutoff},
        {"cutoff_grid", config.cutoff_grid},
        {"provider", provider},
    };
}

namespace {

template <typename F>
auto staged(std::string_view stage, std::chrono::nanoseconds& elapsed, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    try {
        auto r = f();
        elapsed = std::chrono::steady_clock::now() - start;
        return r;
    } catch (const Error& e) {
        throw e.with_context(stage);
    }
}

}  // namespace

AmqResult run_query(std::string_view phrase, const Vocabulary& vocab, const EmbeddingSet& emb,
                    const AmqConfig& config, const EmbeddingProvider& provider) {
    AmqResult result;
    result.phrase = std::string(phrase);
    result.match = staged("retrieval", result.timings.retrieval, [&] {
        return best_term_match(phrase, vocab, emb, provider, config.fuzzy_threshold);
    });
    auto scored = staged("scoring", result.timings.scoring, [&] {
        return score_all(result.match.query_vector, result.match.best_vector, emb, vocab);
    });
    result.split = staged("clustering", result.timings.clustering, [&] {
        std::vector<double> combined;
        combined.reserve(scored.size());
        for (const auto& s : scored) combined.push_back(s.combined);
        return two_means_split(combined);
    });
    result.ranked = staged("ranking", result.timings.ranking, [&] {
        std::vector<std::string> best_codes;
        for (const auto& m : result.match.matched) best_codes.push_back(m.code);
        return rank_terms(mark_retained(std::move(scored), result.split, best_codes));
    });
    return result;
}

}  // namespace amq
