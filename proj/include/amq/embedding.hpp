#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amq/terminology.hpp"

namespace amq {

/// Fixed-length float32 embedding. Unit norm, or all-zero for degenerate
/// inputs. Equality is bitwise over the components.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::vector<float> components) : c_(std::move(components)) {}

    static Vector zero(std::size_t dims) { return Vector(std::vector<float>(dims, 0.0f)); }

    std::size_t dims() const noexcept { return c_.size(); }
    std::span<const float> components() const noexcept { return c_; }
    bool is_zero() const noexcept;
    double norm() const noexcept;

    friend bool operator==(const Vector& a, const Vector& b) noexcept;

private:
    std::vector<float> c_;
};

/// L2-normalizes a double accumulator into float32; zero input gives the
/// zero vector.
Vector normalize(std::span<const double> values);

/// dot(a,b) / sqrt(|a|^2 |b|^2) in double, clamped to [-1, 1]; 0 when
/// either side is the zero vector.
double cosine(const Vector& a, const Vector& b);

// ---------------------------------------------------------------- providers

enum class ProviderKind { LexicalHash, HttpApi };

struct ProviderConfig {
    ProviderKind kind = ProviderKind::LexicalHash;
    std::size_t dims = 256;  // LexicalHash only

    // HttpApi
    std::string endpoint;
    std::string model_name;
    std::string auth_token_env_var;
    std::size_t batch_size = 64;
    std::chrono::milliseconds timeout{30000};

    void validate() const;
    std::string provider_id() const;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual std::string id() const = 0;
    /// Preferred number of texts per embed_batch call.
    virtual std::size_t batch_size() const = 0;
    /// One vector per input text, same order. Implementations must be safe to
    /// call concurrently.
    virtual std::vector<Vector> embed_batch(std::span<const std::string> texts) const = 0;

    /// Number of embed_batch invocations so far.
    std::size_t call_count() const noexcept { return calls_.load(); }

protected:
    void count_call() const noexcept { calls_.fetch_add(1); }

private:
    mutable std::atomic<std::size_t> calls_{0};
};

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Feature-hashing embedding: lowercase word tokens, then character 2-grams,
/// then 3-grams of the lowercased whitespace-collapsed text. Each feature is
/// FNV-1a hashed; bucket = h mod dims, sign from bit 63.
Vector lexical_hash_embed(std::string_view text, std::size_t dims);

class LexicalHashProvider final : public EmbeddingProvider {
public:
    explicit LexicalHashProvider(std::size_t dims);

    std::string id() const override;
    std::size_t batch_size() const override { return 1024; }
    std::vector<Vector> embed_batch(std::span<const std::string> texts) const override;
    std::size_t dims() const noexcept { return dims_; }

private:
    std::size_t dims_;
};

/// POSTs {"model": m, "inputs": [...]} and expects {"vectors": [[...], ...]}.
/// Returned vectors are L2-normalized. The bearer token is read from the
/// configured environment variable on each call.
class HttpApiProvider final : public EmbeddingProvider {
public:
    explicit HttpApiProvider(ProviderConfig config);

    std::string id() const override;
    std::size_t batch_size() const override { return config_.batch_size; }
    std::vector<Vector> embed_batch(std::span<const std::string> texts) const override;

private:
    ProviderConfig config_;
    std::string scheme_host_port_;
    std::string path_;
    mutable std::atomic<std::size_t> dims_{0};  // fixed by the first response
};

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config);

/// Recovers a lexical-hash provider config from its id; throws an input error
/// for any other id.
ProviderConfig provider_config_from_id(std::string_view provider_id);

/// Embeds one text; throws an input error when it is empty after trimming.
Vector embed_text(const EmbeddingProvider& provider, std::string_view text);

// ---------------------------------------------------------------- sets

class EmbeddingSet {
public:
    using VectorMap = std::map<std::string, Vector, std::less<>>;

    EmbeddingSet() = default;
    EmbeddingSet(std::size_t dims, std::string provider_id, std::string vocab_version);

    std::size_t dims() const noexcept { return dims_; }
    const std::string& provider_id() const noexcept { return provider_id_; }
    const std::string& vocab_version() const noexcept { return vocab_version_; }
    std::size_t size() const noexcept { return by_code_.size(); }
    const VectorMap& by_code() const noexcept { return by_code_; }

    /// Throws an input error on dims mismatch or duplicate code.
    void insert(std::string code, Vector v);
    const Vector* find(std::string_view code) const;
    /// Throws an input error when the code has no vector.
    const Vector& at(std::string_view code) const;

    /// True when the codes are exactly the vocabulary's current PTs.
    bool covers_exactly(const Vocabulary& vocab) const;

    friend bool operator==(const EmbeddingSet&, const EmbeddingSet&) = default;

private:
    std::size_t dims_ = 0;
    std::string provider_id_;
    std::string vocab_version_;
    VectorMap by_code_;
};

/// One vector per current PT; texts are sent in ascending code order in
/// provider-sized batches.
EmbeddingSet embed_vocabulary(const EmbeddingProvider& provider, const Vocabulary& vocab);

// ---------------------------------------------------------------- cache file
//
// magic "AMQEMB1\0" | u32 dims | u32 count | u16+provider_id | u16+vocab_version
// then per record: u16+code | dims x f32. All little-endian.

inline constexpr std::string_view kCacheMagic{"AMQEMB1\0", 8};

std::size_t save_embeddings(const EmbeddingSet& set, std::ostream& out);
EmbeddingSet load_embeddings(std::istream& in);
std::string serialize_embeddings(const EmbeddingSet& set);
EmbeddingSet deserialize_embeddings(std::string_view bytes);

}  // namespace amq
