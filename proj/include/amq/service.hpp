#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "amq/embedding.hpp"
#include "amq/pipeline.hpp"
#include "amq/terminology.hpp"

namespace httplib {
class Server;
}

namespace amq {

struct ServiceState {
    Vocabulary vocab;
    EmbeddingSet emb;
    AmqConfig config;
    std::string build_info;
};

struct HttpResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

inline constexpr std::size_t kMaxPhraseBytes = 1024;
inline constexpr std::size_t kMaxSyncEvaluateQueries = 50;
inline constexpr std::string_view kBuildInfo = "amq 1.0.0";

/// Query response document shared by the HTTP API and `amq query --format json`.
/// Terms are the ranked list after the cut-off, truncated to max_terms.
nlohmann::ordered_json query_response_json(const AmqResult& result, double cutoff,
                                           std::optional<std::size_t> max_terms = std::nullopt);

/// Request handlers over immutable state. Each is safe to call from many
/// threads at once.
class Service {
public:
    explicit Service(ServiceState state);

    const ServiceState& state() const noexcept { return state_; }

    HttpResponse handle_query(std::string_view body) const;      // POST /api/query
    HttpResponse handle_evaluate(std::string_view body) const;   // POST /api/evaluate
    HttpResponse handle_info() const;                            // GET /api/info

private:
    ServiceState state_;
    std::unique_ptr<EmbeddingProvider> provider_;
};

struct ServerOptions {
    std::string cors_origin;  // empty: no CORS headers
};

/// Routes /api/query, /api/evaluate, /api/info and /health onto a server; the
/// caller owns binding and listening. `service` must outlive the server.
std::unique_ptr<httplib::Server> make_server(const Service& service, const ServerOptions& options = {});

}  // namespace amq
