#include "amq/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <optional>
#include <thread>

#include "amq/error.hpp"
#include "amq/text.hpp"

namespace amq {

bool Vector::is_zero() const noexcept {
    return std::all_of(c_.begin(), c_.end(), [](float x) { return x == 0.0f; });
}

double Vector::norm() const noexcept {
    double ss = 0.0;
    for (float x : c_) ss += static_cast<double>(x) * static_cast<double>(x);
    return std::sqrt(ss);
}

bool operator==(const Vector& a, const Vector& b) noexcept {
    return a.c_.size() == b.c_.size() &&
           (a.c_.empty() || std::memcmp(a.c_.data(), b.c_.data(), a.c_.size() * sizeof(float)) == 0);
}

Vector normalize(std::span<const double> values) {
    double ss = 0.0;
    for (double v : values) ss += v * v;
    if (ss == 0.0) return Vector::zero(values.size());
    const double n = std::sqrt(ss);
    std::vector<float> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = static_cast<float>(values[i] / n);
    return Vector(std::move(out));
}

double cosine(const Vector& a, const Vector& b) {
    if (a.dims() != b.dims()) {
        throw input_error("cosine: dimension mismatch (" + std::to_string(a.dims()) + " vs " +
                          std::to_string(b.dims()) + ")");
    }
    const auto x = a.components();
    const auto y = b.components();
    double dot = 0.0, nx = 0.0, ny = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        const double yi = y[i];
        dot += xi * yi;
        nx += xi * xi;
        ny += yi * yi;
    }
    if (nx == 0.0 || ny == 0.0) return 0.0;
    return std::clamp(dot / std::sqrt(nx * ny), -1.0, 1.0);
}

// ---------------------------------------------------------------- lexical hash

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

bool is_word_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || c >= 0x80;
}

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

Vector lexical_hash_embed(std::string_view text, std::size_t dims) {
    const std::string lower = ascii_lower(text);
    std::vector<double> acc(dims, 0.0);
    auto add = [&](std::string_view feature) {
        const std::uint64_t h = fnv1a64(feature);
        acc[h % dims] += (h >> 63) == 0 ? 1.0 : -1.0;
    };

    std::size_t start = 0;
    bool in_word = false;
    for (std::size_t i = 0; i <= lower.size(); ++i) {
        const bool word = i < lower.size() && is_word_byte(static_cast<unsigned char>(lower[i]));
        if (word && !in_word) start = i;
        if (!word && in_word) add(std::string_view(lower).substr(start, i - start));
        in_word = word;
    }

    std::string collapsed;
    collapsed.reserve(lower.size());
    bool pending_space = false;
    for (unsigned char c : lower) {
        if (is_space(c)) {
            pending_space = !collapsed.empty();
            continue;
        }
        if (pending_space) collapsed.push_back(' ');
        pending_space = false;
        collapsed.push_back(static_cast<char>(c));
    }
    const std::string_view cv(collapsed);
    for (std::size_t n : {std::size_t{2}, std::size_t{3}}) {
        for (std::size_t i = 0; i + n <= cv.size(); ++i) add(cv.substr(i, n));
    }
    return normalize(acc);
}

LexicalHashProvider::LexicalHashProvider(std::size_t dims) : dims_(dims) {
    if (dims < 8) throw input_error("lexical hash provider needs dims >= 8");
}

std::string LexicalHashProvider::id() const {
    return "lexical-hash-fnv1a64-d" + std::to_string(dims_);
}

std::vector<Vector> LexicalHashProvider::embed_batch(std::span<const std::string> texts) const {
    count_call();
    std::vector<Vector> out(texts.size());
    const std::size_t workers =
        texts.size() < 512 ? 1 : std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), 8);
    if (workers == 1) {
        for (std::size_t i = 0; i < texts.size(); ++i) out[i] = lexical_hash_embed(texts[i], dims_);
        return out;
    }
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < texts.size(); i += workers) out[i] = lexical_hash_embed(texts[i], dims_);
            });
        }
    }
    return out;
}

// ---------------------------------------------------------------- config

void ProviderConfig::validate() const {
    if (kind == ProviderKind::LexicalHash) {
        if (dims < 8) throw input_error("provider dims must be >= 8 for LEXICAL_HASH");
    } else {
        if (endpoint.empty()) throw input_error("provider endpoint must be set for HTTP_API");
        if (batch_size == 0) throw input_error("provider batch_size must be positive");
    }
}

std::string ProviderConfig::provider_id() const {
    if (kind == ProviderKind::LexicalHash) return "lexical-hash-fnv1a64-d" + std::to_string(dims);
    return "http-api:" + model_name;
}

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config) {
    config.validate();
    if (config.kind == ProviderKind::LexicalHash) return std::make_unique<LexicalHashProvider>(config.dims);
    return std::make_unique<HttpApiProvider>(config);
}

ProviderConfig provider_config_from_id(std::string_view provider_id) {
    constexpr std::string_view prefix = "lexical-hash-fnv1a64-d";
    if (provider_id.substr(0, prefix.size()) == prefix) {
        const auto digits = provider_id.substr(prefix.size());
        if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            ProviderConfig cfg;
            cfg.dims = std::stoul(std::string(digits));
            return cfg;
        }
    }
    throw input_error("cannot derive provider settings from id '" + std::string(provider_id) +
                      "'; pass a config file");
}

Vector embed_text(const EmbeddingProvider& provider, std::string_view text) {
    if (trim(text).empty()) throw input_error("cannot embed empty text");
    const std::string s(text);
    auto v = provider.embed_batch(std::span<const std::string>(&s, 1));
    if (v.size() != 1) throw provider_error("provider returned " + std::to_string(v.size()) + " vectors for 1 input");
    return std::move(v.front());
}

// ---------------------------------------------------------------- sets

EmbeddingSet::EmbeddingSet(std::size_t dims, std::string provider_id, std::string vocab_version)
    : dims_(dims), provider_id_(std::move(provider_id)), vocab_version_(std::move(vocab_version)) {}

void EmbeddingSet::insert(std::string code, Vector v) {
    if (v.dims() != dims_) {
        throw input_error("vector for " + code + " has dims " + std::to_string(v.dims()) + ", expected " +
                          std::to_string(dims_));
    }
    const auto [it, inserted] = by_code_.emplace(std::move(code), std::move(v));
    if (!inserted) throw input_error("duplicate code " + it->first + " in embedding set");
}

const Vector* EmbeddingSet::find(std::string_view code) const {
    const auto it = by_code_.find(code);
    return it == by_code_.end() ? nullptr : &it->second;
}

const Vector& EmbeddingSet::at(std::string_view code) const {
    const Vector* v = find(code);
    if (v == nullptr) throw input_error("no embedding for code " + std::string(code));
    return *v;
}

bool EmbeddingSet::covers_exactly(const Vocabulary& vocab) const {
    if (vocab.pt_count() != by_code_.size()) return false;
    return std::all_of(vocab.current_pts().begin(), vocab.current_pts().end(),
                       [&](const Term* t) { return find(t->code) != nullptr; });
}

EmbeddingSet embed_vocabulary(const EmbeddingProvider& provider, const Vocabulary& vocab) {
    if (vocab.pt_count() == 0) throw input_error("vocabulary has no current PTs to embed");
    std::vector<const Term*> ordered(vocab.current_pts().begin(), vocab.current_pts().end());
    std::sort(ordered.begin(), ordered.end(), [](const Term* a, const Term* b) { return a->code < b->code; });

    const std::size_t batch = std::max<std::size_t>(1, provider.batch_size());
    std::optional<EmbeddingSet> set;
    for (std::size_t begin = 0; begin < ordered.size(); begin += batch) {
        const std::size_t end = std::min(ordered.size(), begin + batch);
        std::vector<std::string> texts;
        texts.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) texts.push_back(ordered[i]->label);
        std::vector<Vector> vectors;
        try {
            vectors = provider.embed_batch(texts);
        } catch (const Error& e) {
            throw e.with_context("embedding batch starting at code " + ordered[begin]->code);
        }
        if (vectors.size() != texts.size()) {
            throw provider_error("embedding batch starting at code " + ordered[begin]->code + ": got " +
                                 std::to_string(vectors.size()) + " vectors for " + std::to_string(texts.size()) +
                                 " inputs");
        }
        if (!set) set.emplace(vectors.front().dims(), provider.id(), vocab.version());
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            if (vectors[i].dims() != set->dims()) {
                throw provider_error("code " + ordered[begin + i]->code + ": vector dims " +
                                     std::to_string(vectors[i].dims()) + " differ from " +
                                     std::to_string(set->dims()));
            }
            set->insert(ordered[begin + i]->code, std::move(vectors[i]));
        }
    }
    return std::move(*set);
}

}  // namespace amq
