#include "ragcheck/embedding.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include <httplib.h>
#include <json.hpp>

#include "ragcheck/errors.hpp"
#include "ragcheck/sha256.hpp"
#include "ragcheck/textproc.hpp"

namespace ragcheck::embedding {
namespace {

uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Splits "http://host:port/path" into (scheme://host:port, /path).
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_begin = endpoint.find('/', host_begin);
    if (path_begin == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_begin), endpoint.substr(path_begin)};
}

} // namespace

HashedEmbeddingProvider::HashedEmbeddingProvider(size_t dim) : dim_(dim) {
    if (dim_ == 0) throw ValidationError("embedding dimension must be positive");
}

std::vector<EmbeddingVector> HashedEmbeddingProvider::embed(
    const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        EmbeddingVector vec;
        vec.values.assign(dim_, 0.0);
        for (const auto& token : textproc::tokenize(text).tokens) {
            uint64_t h = fnv1a64(token);
            size_t bucket = h % dim_;
            double sign = ((h >> 61) & 1) ? 1.0 : -1.0;
            vec.values[bucket] += sign;
        }
        double norm = 0.0;
        for (double v : vec.values) norm += v * v;
        if (norm > 0.0) {
            norm = std::sqrt(norm);
            for (double& v : vec.values) v /= norm;
        }
        out.push_back(std::move(vec));
    }
    return out;
}

std::string HashedEmbeddingProvider::identity() const {
    return "hashed-bow/v1/dim=" + std::to_string(dim_);
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string endpoint, std::string model)
    : endpoint_(std::move(endpoint)), model_(std::move(model)) {}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed(
    const std::vector<std::string>& texts) {
    if (texts.empty()) return {};
    auto [host, path] = split_endpoint(endpoint_);
    httplib::Client client(host);
    client.set_read_timeout(60, 0);

    nlohmann::json request = {{"texts", texts}};
    if (!model_.empty()) request["model"] = model_;
    auto res = client.Post(path, request.dump(), "application/json");
    if (!res)
        throw OperationError("embedding provider unreachable: " + endpoint_);
    if (res->status != 200)
        throw OperationError("embedding provider error " + std::to_string(res->status) +
                             ": " + res->body);

    nlohmann::json body;
    try {
        body = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw OperationError(std::string("embedding provider returned invalid JSON: ") +
                             e.what());
    }
    if (!body.contains("vectors") || !body["vectors"].is_array())
        throw OperationError("embedding provider response missing 'vectors'");
    size_t dim = body.value("dim", size_t{0});

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& row : body["vectors"]) {
        EmbeddingVector vec;
        vec.values = row.get<std::vector<double>>();
        if (dim == 0) dim = vec.dim();
        if (vec.dim() != dim)
            throw OperationError("embedding provider returned inconsistent dimensions");
        for (double v : vec.values)
            if (!std::isfinite(v))
                throw OperationError("embedding provider returned a non-finite value");
        out.push_back(std::move(vec));
    }
    if (out.size() != texts.size())
        throw OperationError("embedding provider returned " + std::to_string(out.size()) +
                             " vectors for " + std::to_string(texts.size()) + " texts");
    if (seen_dim_ != 0 && dim != seen_dim_)
        throw OperationError("embedding dimension drift within session: " +
                             std::to_string(seen_dim_) + " -> " + std::to_string(dim));
    seen_dim_ = dim;
    return out;
}

std::string HttpEmbeddingProvider::identity() const {
    return "http:" + endpoint_ + (model_.empty() ? "" : "#" + model_);
}

void write_embedding_cache(const std::filesystem::path& file, const std::string& identity,
                           const std::unordered_map<std::string, EmbeddingVector>& entries) {
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["provider"] = identity;
    nlohmann::json map = nlohmann::json::object();
    for (const auto& [key, vec] : entries) map[key] = vec.values;
    doc["entries"] = std::move(map);

    std::filesystem::path tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw OperationError("cannot write embedding cache: " + tmp.string());
        out << doc.dump();
    }
    std::filesystem::rename(tmp, file);
}

std::pair<std::string, std::unordered_map<std::string, EmbeddingVector>>
read_embedding_cache(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw OperationError("cannot open embedding cache: " + file.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw OperationError("embedding cache is not valid JSON: " + file.string() + ": " +
                             e.what());
    }
    std::unordered_map<std::string, EmbeddingVector> entries;
    for (const auto& [key, value] : doc.at("entries").items()) {
        EmbeddingVector vec;
        vec.values = value.get<std::vector<double>>();
        entries.emplace(key, std::move(vec));
    }
    return {doc.value("provider", ""), std::move(entries)};
}

CachingEmbeddingProvider::CachingEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner,
                                                   std::filesystem::path cache_file)
    : inner_(std::move(inner)), cache_file_(std::move(cache_file)) {
    if (!cache_file_.empty() && std::filesystem::exists(cache_file_)) {
        auto [identity, entries] = read_embedding_cache(cache_file_);
        if (identity != inner_->identity())
            throw OperationError("embedding cache " + cache_file_.string() +
                                 " was recorded by provider '" + identity +
                                 "', not '" + inner_->identity() + "'");
        entries_ = std::move(entries);
        if (!entries_.empty()) known_dim_ = entries_.begin()->second.dim();
    }
}

std::vector<EmbeddingVector> CachingEmbeddingProvider::embed(
    const std::vector<std::string>& texts) {
    std::vector<std::string> misses;
    {
        std::shared_lock lock(mutex_);
        for (const auto& text : texts) {
            std::string key = sha256_hex(text);
            if (!entries_.count(key)) misses.push_back(text);
        }
    }
    if (!misses.empty()) {
        // Dedupe while preserving order for the inner call.
        std::vector<std::string> unique;
        std::unordered_map<std::string, size_t> seen;
        for (auto& text : misses) {
            std::string key = sha256_hex(text);
            if (seen.emplace(key, unique.size()).second) unique.push_back(std::move(text));
        }
        auto vectors = inner_->embed(unique);
        if (vectors.size() != unique.size())
            throw OperationError("embedding provider returned wrong vector count");
        std::unique_lock lock(mutex_);
        ++inner_calls_;
        for (const auto& vec : vectors) {
            if (known_dim_ == 0) known_dim_ = vec.dim();
            if (vec.dim() != known_dim_)
                throw OperationError("embedding dimension drift across session: " +
                                     std::to_string(known_dim_) + " -> " +
                                     std::to_string(vec.dim()));
        }
        for (size_t i = 0; i < unique.size(); ++i)
            entries_[sha256_hex(unique[i])] = std::move(vectors[i]);
        if (!cache_file_.empty()) write_embedding_cache(cache_file_, inner_->identity(), entries_);
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    std::shared_lock lock(mutex_);
    for (const auto& text : texts) out.push_back(entries_.at(sha256_hex(text)));
    return out;
}

std::string CachingEmbeddingProvider::identity() const { return inner_->identity(); }

void CachingEmbeddingProvider::save() const {
    if (cache_file_.empty()) return;
    std::shared_lock lock(mutex_);
    write_embedding_cache(cache_file_, inner_->identity(), entries_);
}

ReplayEmbeddingProvider::ReplayEmbeddingProvider(const std::filesystem::path& cache_file) {
    auto [identity, entries] = read_embedding_cache(cache_file);
    identity_ = identity;
    entries_ = std::move(entries);
}

std::vector<EmbeddingVector> ReplayEmbeddingProvider::embed(
    const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        auto it = entries_.find(sha256_hex(text));
        if (it == entries_.end())
            throw OperationError("replay cache miss for text: \"" + text.substr(0, 60) +
                                 (text.size() > 60 ? "...\"" : "\""));
        out.push_back(it->second);
    }
    return out;
}

std::string ReplayEmbeddingProvider::identity() const { return identity_; }

} // namespace ragcheck::embedding
