#include "amq/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include "amq/embedding.hpp"
#include "amq/error.hpp"
#include "amq/evaluation.hpp"
#include "amq/json_format.hpp"
#include "amq/pipeline.hpp"
#include "amq/service.hpp"
#include "amq/terminology.hpp"

namespace amq::cli {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open " + path);
    return read_stream(in);
}

/// Writes via a sibling temp file and rename so readers never see a partial file.
void write_atomically(const fs::path& path, std::string_view bytes) {
    const fs::path tmp = path.parent_path() / ("." + path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw input_error("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw input_error("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

AmqConfig load_config(const std::string& path) {
    if (path.empty()) return AmqConfig{};
    try {
        return config_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(1, path + ": " + e.what());
    }
}

Vocabulary load_vocab(const std::string& path, CaseMode mode, const std::string& version) {
    try {
        return parse_vocabulary(read_file(path), mode, version);
    } catch (const Error& e) {
        throw e.with_context(path);
    }
}

EmbeddingSet load_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open " + path);
    try {
        return load_embeddings(in);
    } catch (const Error& e) {
        throw e.with_context(path);
    }
}

struct Loaded {
    Vocabulary vocab;
    EmbeddingSet emb;
    AmqConfig config;
};

/// Loads vocab + cache and checks they belong together. Without a config file
/// the provider is recovered from the cache's provider id.
Loaded load_for_query(const std::string& vocab_path, const std::string& cache_path, const std::string& config_path,
                      const std::string& vocab_version) {
    Loaded l;
    l.config = load_config(config_path);
    l.vocab = load_vocab(vocab_path, l.config.case_mode, vocab_version);
    l.emb = load_cache(cache_path);
    if (config_path.empty()) l.config.provider = provider_config_from_id(l.emb.provider_id());
    if (l.emb.vocab_version() != l.vocab.version()) {
        throw validation_error("cache_mismatch: cache was built for vocabulary version '" + l.emb.vocab_version() +
                               "', vocabulary is '" + l.vocab.version() + "'");
    }
    if (!l.emb.covers_exactly(l.vocab)) {
        throw validation_error("cache_mismatch: cache codes do not match the vocabulary's current PTs");
    }
    if (l.config.provider.provider_id() != l.emb.provider_id()) {
        throw validation_error("cache_mismatch: cache provider '" + l.emb.provider_id() +
                               "' differs from configured provider '" + l.config.provider.provider_id() + "'");
    }
    return l;
}

void print_table(std::ostream& out, const AmqResult& result, double cutoff, std::optional<std::size_t> max_terms) {
    out << "phrase: " << result.phrase << "\n";
    out << "match: " << to_string(result.match.method);
    for (const auto& m : result.match.matched) out << " | " << m.label << " (" << format_fixed4(m.score) << ")";
    out << "\n";
    out << "split_value: " << format_fixed4(result.split.split_value) << "  retained: " << result.ranked.size()
        << "  cutoff: " << format_fixed4(cutoff) << "\n\n";
    out << std::left << std::setw(5) << "rank" << std::setw(11) << "code" << std::setw(40) << "label" << std::right
        << std::setw(9) << "sim_best" << std::setw(10) << "sim_query" << std::setw(10) << "combined" << "\n";
    auto kept = apply_cutoff(result.ranked, cutoff);
    if (max_terms && kept.size() > *max_terms) kept.resize(*max_terms);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const auto& t = kept[i];
        out << std::left << std::setw(5) << (i + 1) << std::setw(11) << t.code << std::setw(40) << t.label
            << std::right << std::setw(9) << format_fixed4(t.sim_best) << std::setw(10) << format_fixed4(t.sim_query)
            << std::setw(10) << format_fixed4(t.combined) << "\n";
    }
}

struct EmbedOptions {
    std::string vocab, out, provider = "lexical", config, vocab_version{kDefaultVocabVersion};
    std::size_t dims = 256;
    std::string endpoint, model, token_env;
    std::size_t batch_size = 64;
};

int cmd_embed(const EmbedOptions& o, std::ostream& out) {
    AmqConfig config = load_config(o.config);
    if (o.provider == "lexical") {
        config.provider.kind = ProviderKind::LexicalHash;
        config.provider.dims = o.dims;
    } else {
        config.provider.kind = ProviderKind::HttpApi;
        if (!o.endpoint.empty()) config.provider.endpoint = o.endpoint;
        if (!o.model.empty()) config.provider.model_name = o.model;
        if (!o.token_env.empty()) config.provider.auth_token_env_var = o.token_env;
        config.provider.batch_size = o.batch_size;
    }
    const Vocabulary vocab = load_vocab(o.vocab, config.case_mode, o.vocab_version);
    const auto provider = make_provider(config.provider);

    const auto start = std::chrono::steady_clock::now();
    const EmbeddingSet set = embed_vocabulary(*provider, vocab);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

    write_atomically(o.out, serialize_embeddings(set));
    const double secs = elapsed.count();
    out << "embedded " << set.size() << " terms, dims " << set.dims() << ", provider " << set.provider_id() << "\n"
        << "elapsed " << std::fixed << std::setprecision(3) << secs << " s, "
        << std::setprecision(0) << (secs > 0 ? static_cast<double>(set.size()) / secs : 0.0) << " terms/s\n"
        << std::defaultfloat << "wrote " << o.out << "\n";
    return kExitOk;
}

struct QueryOptions {
    std::string cache, vocab, phrase, format = "table", config, vocab_version{kDefaultVocabVersion};
    std::optional<double> cutoff;
    std::optional<std::size_t> max_terms;
};

int cmd_query(const QueryOptions& o, std::ostream& out) {
    const Loaded l = load_for_query(o.vocab, o.cache, o.config, o.vocab_version);
    const auto provider = make_provider(l.config.provider);
    const double cutoff = o.cutoff.value_or(l.config.default_cutoff);
    const auto result = run_query(o.phrase, l.vocab, l.emb, l.config, *provider);
    if (o.format == "json") {
        out << dump_fixed(query_response_json(result, cutoff, o.max_terms)) << "\n";
    } else {
        print_table(out, result, cutoff, o.max_terms);
    }
    return kExitOk;
}

struct EvaluateOptions {
    std::string gold, cache, vocab, cutoffs, out_dir, config, vocab_version{kDefaultVocabVersion};
    bool narrow = false;
    std::size_t workers = 0;
};

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
    Loaded l = load_for_query(o.vocab, o.cache, o.config, o.vocab_version);
    if (!o.cutoffs.empty()) l.config.cutoff_grid = parse_cutoff_grid(o.cutoffs);
    l.config.validate();
    std::vector<GoldQuery> gold;
    try {
        gold = parse_gold_sets(read_file(o.gold));
    } catch (const Error& e) {
        throw e.with_context(o.gold);
    }
    const auto provider = make_provider(l.config.provider);

    const auto start = std::chrono::steady_clock::now();
    const EvalReport report = evaluate(gold, l.vocab, l.emb, l.config, *provider, o.narrow, o.workers);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

    const std::vector<std::pair<std::string, std::string>> files{
        {"report.json", report_json_text(report)},
        {"table2.csv", table2_csv(report)},
        {"table3.csv", table3_csv(report)},
        {"sanitization.csv", sanitization_csv(report)},
    };
    const fs::path dir(o.out_dir);
    std::vector<fs::path> written;
    try {
        fs::create_directories(dir);
        for (const auto& [name, text] : files) {
            write_atomically(dir / name, text);
            written.push_back(dir / name);
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) fs::remove(p, ec);
        for (const auto& [name, text] : files) fs::remove(dir / ("." + name + ".tmp"), ec);
        throw;
    }

    out << "evaluated " << gold.size() << " queries (" << report.excluded_queries.size() << " without gold terms) over "
        << report.cutoff_grid.size() << " cut-offs" << (report.narrow_mode ? ", narrow scope" : "") << " in "
        << std::fixed << std::setprecision(3) << elapsed.count() << " s\n" << std::defaultfloat;
    out << "sanitisation excluded " << report.sanitization.total_excluded << " terms across "
        << report.sanitization.affected_queries << " queries\n";
    for (const auto& row : report.sweep) {
        out << "  cutoff " << format_fixed4(row.cutoff) << "  P " << format_fixed4(row.precision.mean) << "  R "
            << format_fixed4(row.recall.mean) << "  F1 " << format_fixed4(row.f1.mean) << "\n";
    }
    out << "wrote " << dir.string() << "/{report.json,table2.csv,table3.csv,sanitization.csv}\n";
    return kExitOk;
}

struct ServeOptions {
    std::string vocab, cache, config, host = "127.0.0.1", cors_origin, vocab_version{kDefaultVocabVersion};
    int port = 8080;
};

int cmd_serve(const ServeOptions& o, std::ostream& out) {
    Loaded l = load_for_query(o.vocab, o.cache, o.config, o.vocab_version);
    const Service service(ServiceState{std::move(l.vocab), std::move(l.emb), std::move(l.config), std::string(kBuildInfo)});
    auto server = make_server(service, ServerOptions{o.cors_origin});
    if (!server->bind_to_port(o.host, o.port)) throw input_error("cannot bind " + o.host + ":" + std::to_string(o.port));
    out << "serving " << service.state().vocab.pt_count() << " terms on http://" << o.host << ":" << o.port << "\n"
        << std::flush;
    server->listen_after_bind();
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Automated medical query: embedding-based preferred-term retrieval and evaluation", "amq"};
    app.require_subcommand(1);

    EmbedOptions eo;
    auto* embed = app.add_subcommand("embed", "Embed every current PT into a binary cache");
    embed->add_option("--vocab", eo.vocab, "Vocabulary CSV (code,label,level,current)")->required();
    embed->add_option("--out", eo.out, "Output cache path")->required();
    embed->add_option("--provider", eo.provider, "Embedding provider")->check(CLI::IsMember({"lexical", "http"}));
    embed->add_option("--dims", eo.dims, "Dimensions for the lexical provider")->check(CLI::Range(8, 1 << 20));
    embed->add_option("--vocab-version", eo.vocab_version, "Version tag recorded in the cache");
    embed->add_option("--config", eo.config, "AmqConfig JSON");
    embed->add_option("--endpoint", eo.endpoint, "HTTP provider endpoint URL");
    embed->add_option("--model", eo.model, "HTTP provider model name");
    embed->add_option("--token-env", eo.token_env, "Environment variable holding the bearer token");
    embed->add_option("--batch-size", eo.batch_size, "HTTP provider batch size")->check(CLI::PositiveNumber);

    QueryOptions qo;
    auto* query = app.add_subcommand("query", "Rank PTs for one phrase");
    query->add_option("--cache", qo.cache, "Embedding cache")->required();
    query->add_option("--vocab", qo.vocab, "Vocabulary CSV")->required();
    query->add_option("--phrase", qo.phrase, "Query phrase")->required();
    query->add_option("--cutoff", qo.cutoff, "Minimum sim_best (default from config, 0.60)");
    query->add_option("--max-terms", qo.max_terms, "Truncate the list");
    query->add_option("--format", qo.format, "Output format")->check(CLI::IsMember({"json", "table"}));
    query->add_option("--config", qo.config, "AmqConfig JSON");
    query->add_option("--vocab-version", qo.vocab_version, "Expected vocabulary version tag");

    EvaluateOptions vo;
    auto* evaluate = app.add_subcommand("evaluate", "Sweep cut-offs against a gold query set");
    evaluate->add_option("--gold", vo.gold, "Gold CSV (query_name,query_phrase,term_label[,scope])")->required();
    evaluate->add_option("--cache", vo.cache, "Embedding cache")->required();
    evaluate->add_option("--vocab", vo.vocab, "Vocabulary CSV")->required();
    evaluate->add_option("--out", vo.out_dir, "Output directory")->required();
    evaluate->add_option("--cutoffs", vo.cutoffs, "Cut-off grid A:B:STEP (default 0.5:0.9:0.05)");
    evaluate->add_flag("--narrow", vo.narrow, "Score against NARROW gold entries only");
    evaluate->add_option("--config", vo.config, "AmqConfig JSON");
    evaluate->add_option("--vocab-version", vo.vocab_version, "Expected vocabulary version tag");
    evaluate->add_option("--workers", vo.workers, "Worker threads (0 = all cores)");

    ServeOptions so;
    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    serve->add_option("--vocab", so.vocab, "Vocabulary CSV")->required();
    serve->add_option("--cache", so.cache, "Embedding cache")->required();
    serve->add_option("--config", so.config, "AmqConfig JSON");
    serve->add_option("--host", so.host, "Listen address");
    serve->add_option("--port", so.port, "Listen port")->check(CLI::Range(0, 65535));
    serve->add_option("--cors-origin", so.cors_origin, "Allowed CORS origin for the review console");
    serve->add_option("--vocab-version", so.vocab_version, "Expected vocabulary version tag");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        if (!reversed.empty()) reversed.pop_back();  // program name
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*embed) return cmd_embed(eo, out);
        if (*query) return cmd_query(qo, out);
        if (*evaluate) return cmd_evaluate(vo, out);
        if (*serve) return cmd_serve(so, out);
    } catch (const Error& e) {
        err << "amq: " << to_string(e.kind()) << ": " << e.what() << "\n";
        return e.kind() == ErrorKind::Provider ? kExitProvider : kExitInput;
    } catch (const fs::filesystem_error& e) {
        err << "amq: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "amq: internal error: " << e.what() << "\n";
        return 1;
    }
    return kExitInput;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace amq::cli
