#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "amq/embedding.hpp"
#include "amq/error.hpp"

namespace amq {

namespace {

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) throw input_error("endpoint must start with http:// or https://");
    const std::string scheme = endpoint.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw input_error("unsupported endpoint scheme '" + scheme + "'");
    const auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace

HttpApiProvider::HttpApiProvider(ProviderConfig config) : config_(std::move(config)) {
    config_.kind = ProviderKind::HttpApi;
    config_.validate();
    std::tie(scheme_host_port_, path_) = split_endpoint(config_.endpoint);
}

std::string HttpApiProvider::id() const {
    return config_.provider_id();
}

std::vector<Vector> HttpApiProvider::embed_batch(std::span<const std::string> texts) const {
    count_call();
    nlohmann::json request = {{"model", config_.model_name}, {"inputs", nlohmann::json::array()}};
    for (const auto& t : texts) request["inputs"].push_back(t);

    httplib::Client client(scheme_host_port_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    if (!config_.auth_token_env_var.empty()) {
        if (const char* token = std::getenv(config_.auth_token_env_var.c_str()); token && *token) {
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
    }

    auto res = client.Post(path_, headers, request.dump(), "application/json");
    if (!res) {
        throw provider_error("request to " + scheme_host_port_ + path_ + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw provider_error("embedding service returned a non-2xx response", res->status);
    }

    nlohmann::json body;
    try {
        body = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw provider_error(std::string("embedding service returned invalid JSON: ") + e.what(), res->status);
    }
    if (!body.is_object() || !body.contains("vectors") || !body["vectors"].is_array()) {
        throw provider_error("embedding service response has no 'vectors' array", res->status);
    }
    const auto& vectors = body["vectors"];
    if (vectors.size() != texts.size()) {
        throw provider_error("embedding service returned " + std::to_string(vectors.size()) + " vectors for " +
                             std::to_string(texts.size()) + " inputs");
    }

    std::vector<Vector> out;
    out.reserve(vectors.size());
    for (const auto& v : vectors) {
        if (!v.is_array() || v.empty()) throw provider_error("embedding service returned a malformed vector");
        std::size_t expected = 0;
        if (!dims_.compare_exchange_strong(expected, v.size()) && expected != v.size()) {
            throw provider_error("embedding dimension changed from " + std::to_string(expected) + " to " +
                                 std::to_string(v.size()));
        }
        std::vector<double> values;
        values.reserve(v.size());
        for (const auto& x : v) {
            if (!x.is_number()) throw provider_error("embedding service returned a non-numeric component");
            values.push_back(x.get<double>());
        }
        out.push_back(normalize(values));
    }
    return out;
}

}  // namespace amq
