#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ragcheck/corpus.hpp"
#include "ragcheck/embedding.hpp"
#include "ragcheck/similarity.hpp"

namespace ragcheck::detectors {

/// Decision parameters for the detectors: T1 gates embedding cosine, T2 the
/// overlap ratio, T3 the hallucinated-keyword fraction. All in [0, 1].
struct Thresholds {
    double t1_cosine = 0.6;
    double t2_overlap = 0.1;
    double t3_keyword = 0.2;
};

enum class SimilarityMode { Cosine, Overlap, Hybrid };

struct SentenceEvidence {
    // Index of the best-matching context sentence under the mode's active
    // score, -1 when no score was computable.
    int best_context_index = -1;
    std::optional<double> cosine;  // max cosine over context sentences
    std::optional<double> overlap; // max overlap ratio over context sentences
};

struct DetectionResult {
    corpus::ExampleLabel example_label = corpus::ExampleLabel::NotHallucinated;
    std::vector<size_t> unsupported_sentence_indices; // ascending
    std::vector<SentenceEvidence> per_sentence_evidence;
};

// True iff some context sentence's embedding cosine with `sent` exceeds t1
// (strict). Context must be nonempty.
bool sentence_supported_cosine(const std::string& sent,
                               const std::vector<std::string>& context_sentences, double t1,
                               embedding::EmbeddingProvider& provider);

// True iff some context sentence's overlap ratio with `sent` exceeds t2
// (strict).
bool sentence_supported_overlap(const std::string& sent,
                                const std::vector<std::string>& context_sentences, double t2,
                                const similarity::OverlapOptions& options = {});

// Sentence-similarity detection. A sentence is supported when the mode's test
// passes against any context sentence; Hybrid tries cosine first and falls
// back to overlap. The example is Hallucinated iff any sentence is
// unsupported.
DetectionResult detect_similarity(const corpus::QaTriple& triple, SimilarityMode mode,
                                  const Thresholds& thresholds,
                                  embedding::EmbeddingProvider* provider,
                                  const similarity::OverlapOptions& options = {});

// Keyword detection: a keyword is hallucinated when its normalized token
// sequence does not occur contiguously in the normalized context; the example
// is Hallucinated iff hallucinated/total > t3. Unsupported indices mark
// answer sentences containing at least one hallucinated keyword.
DetectionResult detect_keyword(const corpus::QaTriple& triple,
                               const std::vector<std::string>& keywords, double t3);

// Contiguous containment of `needle` tokens inside `haystack` tokens.
bool contains_token_sequence(const std::vector<std::string>& haystack,
                             const std::vector<std::string>& needle);

} // namespace ragcheck::detectors
