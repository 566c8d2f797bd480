#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ragcheck/embedding.hpp"

namespace ragcheck::retrieval {

enum class Level { Document, Section, Paragraph };

std::string to_string(Level level);
Level parse_level(const std::string& text);

/// Hierarchical manual content. Paragraphs are leaves; a parent's text is the
/// concatenation of its children's texts.
struct DocNode {
    std::string id;
    Level level = Level::Document;
    std::optional<std::string> title;
    std::string text;
    std::vector<DocNode> children;
};

// Parses a manual into a Document -> Section -> Paragraph tree with stable,
// zero-padded ids. Accepts a pre-chunked JSON file ({"id","title","sections":
// [{"title","paragraphs":[...]}]}) or a minimal HTML subset (<h1>/<h2>
// headings, <p> paragraphs). Throws ValidationError on empty or unparseable
// input. A JSON file holding {"documents": [...]} is rejected here; use
// ingest_corpus.
DocNode ingest_manual(const std::filesystem::path& source);
std::vector<DocNode> ingest_corpus(const std::filesystem::path& source);

// Same parsers over in-memory content; `format` is "json" or "html".
DocNode ingest_manual_text(const std::string& content, const std::string& format,
                           const std::string& fallback_id);

struct RetrievalHit {
    std::string node_id;
    Level level = Level::Paragraph;
    double score = 0.0;
    std::string text;
};

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
    bool filter_stopwords = false;
};

struct EnsembleParams {
    double sparse_weight = 0.5;
    double dense_weight = 0.5;
    size_t over_retrieve = 5; // fetch over_retrieve * k from each system
};

struct AdaptiveParams {
    double descent_threshold = 0.5; // normalized score below which we descend
    double sibling_ratio = 0.5;     // keep chunks scoring >= ratio * max sibling
};

struct EnsembleOutcome {
    std::vector<RetrievalHit> hits;
    bool dense_unavailable = false; // fell back to sparse-only
};

/// Index over every unit of a document forest at all three granularity
/// levels: inverted term postings plus per-level length statistics for BM25,
/// and one dense vector per unit when built with a provider. Immutable after
/// construction; concurrent searches are safe.
class MultiGranularityIndex {
public:
    struct Unit {
        std::string node_id;
        Level level = Level::Paragraph;
        std::string text;
        size_t token_count = 0;
        int parent = -1;              // index into units(), -1 for roots
        std::vector<int> children;    // document order
        int document = -1;            // index of the owning document root
    };

    struct Posting {
        int unit = 0; // index into units()
        size_t term_frequency = 0;
    };

    const std::vector<Unit>& units() const { return units_; }
    const std::vector<int>& document_roots() const { return roots_; }
    // Postings for a term, sorted by unit id; empty for unseen terms.
    const std::vector<Posting>& postings(const std::string& term) const;
    bool has_dense() const { return !dense_.empty(); }
    const embedding::EmbeddingVector& dense_vector(int unit) const { return dense_.at(unit); }
    const std::string& provider_identity() const { return provider_identity_; }

    size_t level_unit_count(Level level) const;
    double level_avg_tokens(Level level) const;
    size_t level_document_frequency(const std::string& term, Level level) const;

    void save(const std::filesystem::path& file) const;
    static MultiGranularityIndex load(const std::filesystem::path& file);

    friend MultiGranularityIndex build_index(const std::vector<DocNode>& forest,
                                             embedding::EmbeddingProvider* provider,
                                             const Bm25Params& params);

private:
    std::vector<Unit> units_;
    std::vector<int> roots_;
    std::map<std::string, std::vector<Posting>> inverted_;
    std::vector<embedding::EmbeddingVector> dense_;
    std::string provider_identity_;
    bool stopwords_filtered_ = false;
};

// Indexes a forest (or single tree) at all three levels. Dense vectors are
// computed per unit when a provider is given; a provider failure leaves a
// valid sparse-only index.
MultiGranularityIndex build_index(const std::vector<DocNode>& forest,
                                  embedding::EmbeddingProvider* provider = nullptr,
                                  const Bm25Params& params = {});
MultiGranularityIndex build_index(const DocNode& tree,
                                  embedding::EmbeddingProvider* provider = nullptr,
                                  const Bm25Params& params = {});

// BM25 (k1=0.9, b=0.4 defaults) over normalized query tokens, statistics per
// granularity level. Only units matching at least one query term are
// returned; ties break by node id.
std::vector<RetrievalHit> search_sparse(const MultiGranularityIndex& index,
                                        const std::string& query, size_t k,
                                        std::optional<Level> level = std::nullopt,
                                        const Bm25Params& params = {});

// Cosine between the query embedding and unit vectors; requires a dense index
// and the same provider family that built it.
std::vector<RetrievalHit> search_dense(const MultiGranularityIndex& index,
                                       const std::string& query, size_t k,
                                       embedding::EmbeddingProvider& provider,
                                       std::optional<Level> level = std::nullopt);

// Over-retrieves over_retrieve*k hits from each system, min-max normalizes
// each score list, merges with the configured weights (a unit missing from
// one side contributes 0 there) and reranks to the top k. Without dense
// vectors it degrades to sparse-only and flags the outcome.
EnsembleOutcome search_ensemble(const MultiGranularityIndex& index, const std::string& query,
                                size_t k, embedding::EmbeddingProvider* provider,
                                const Bm25Params& bm25 = {}, const EnsembleParams& ensemble = {},
                                std::optional<Level> level = std::nullopt);

// Hierarchical scope search: documents scoring below descent_threshold
// (per-level min-max-normalized ensemble score) are descended section by
// section down to paragraphs; at the finest visited level the chunks scoring
// at least sibling_ratio * the best sibling are kept. The hit text is the
// kept chunks concatenated in document order and the hit score is their mean.
std::vector<RetrievalHit> search_adaptive(const MultiGranularityIndex& index,
                                          const std::string& query, size_t k,
                                          embedding::EmbeddingProvider* provider,
                                          const AdaptiveParams& adaptive = {},
                                          const Bm25Params& bm25 = {},
                                          const EnsembleParams& ensemble = {});

} // namespace ragcheck::retrieval
