#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "ragcheck/similarity.hpp"

namespace ragcheck::embedding {

using similarity::EmbeddingVector;

/// Batch sentence-embedding source. Implementations must return one vector per
/// input text, order preserving, with a constant dimension per provider.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
    // Stable identifier versioning caches ("hashed-bow/v1/dim=384", "http:...").
    virtual std::string identity() const = 0;
};

// Deterministic, dependency-free provider: a feature-hashed bag of normalized
// tokens with pseudo-random signs, L2-normalized. Identical texts embed
// identically on every platform; disjoint vocabularies land near-orthogonal.
class HashedEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit HashedEmbeddingProvider(size_t dim = 384);
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::string identity() const override;
    size_t dim() const { return dim_; }

private:
    size_t dim_;
};

// Remote provider speaking the wire contract
//   request:  {"texts": [string, ...]}
//   response: {"vectors": [[real, ...], ...], "dim": int}
// over HTTP POST. Throws OperationError when unreachable or on a malformed
// response, and on dimension drift within a session.
class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    // endpoint like "http://host:port/embed".
    explicit HttpEmbeddingProvider(std::string endpoint, std::string model = "");
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::string identity() const override;

private:
    std::string endpoint_;
    std::string model_;
    size_t seen_dim_ = 0;
};

// Content-addressed cache in front of another provider. Keys are
// sha256(text); the persisted file records the inner provider's identity and
// refuses to serve a different provider's vectors. Reads are concurrent;
// persistence is write-temp-then-rename.
class CachingEmbeddingProvider final : public EmbeddingProvider {
public:
    CachingEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner,
                             std::filesystem::path cache_file = {});
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::string identity() const override;

    size_t inner_calls() const { return inner_calls_; }
    void save() const;

private:
    std::shared_ptr<EmbeddingProvider> inner_;
    std::filesystem::path cache_file_;
    std::unordered_map<std::string, EmbeddingVector> entries_;
    mutable std::shared_mutex mutex_;
    size_t inner_calls_ = 0;
    size_t known_dim_ = 0;
};

// Cache-only provider: serves recorded vectors, errors on any miss. Identity
// is the one recorded in the cache file.
class ReplayEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit ReplayEmbeddingProvider(const std::filesystem::path& cache_file);
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::string identity() const override;

private:
    std::string identity_;
    std::unordered_map<std::string, EmbeddingVector> entries_;
};

// Cache file round-trip, shared by the caching and replay providers.
void write_embedding_cache(const std::filesystem::path& file, const std::string& identity,
                           const std::unordered_map<std::string, EmbeddingVector>& entries);
std::pair<std::string, std::unordered_map<std::string, EmbeddingVector>>
read_embedding_cache(const std::filesystem::path& file);

} // namespace ragcheck::embedding
