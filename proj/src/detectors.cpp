#include "ragcheck/detectors.hpp"

#include <algorithm>
#include <cmath>

#include "ragcheck/errors.hpp"
#include "ragcheck/textproc.hpp"

namespace ragcheck::detectors {
namespace {

using textproc::TokenSequence;

// Cosine of two provider vectors, or nullopt when either has zero norm
// (all-punctuation sentences embed to zero and carry no signal).
std::optional<double> safe_cosine(const similarity::EmbeddingVector& u,
                                  const similarity::EmbeddingVector& v) {
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (size_t i = 0; i < u.values.size() && i < v.values.size(); ++i) {
        dot += u.values[i] * v.values[i];
        nu += u.values[i] * u.values[i];
        nv += v.values[i] * v.values[i];
    }
    if (nu == 0.0 || nv == 0.0) return std::nullopt;
    return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

std::optional<double> max_overlap(const TokenSequence& sent,
                                  const std::vector<TokenSequence>& context,
                                  const similarity::OverlapOptions& options,
                                  int* best_index) {
    std::optional<double> best;
    for (size_t j = 0; j < context.size(); ++j) {
        if (sent.empty() || context[j].empty()) continue;
        double r = similarity::overlap_ratio(sent, context[j], options);
        if (!best || r > *best) {
            best = r;
            if (best_index) *best_index = static_cast<int>(j);
        }
    }
    return best;
}

} // namespace

bool sentence_supported_cosine(const std::string& sent,
                               const std::vector<std::string>& context_sentences, double t1,
                               embedding::EmbeddingProvider& provider) {
    if (context_sentences.empty())
        throw ValidationError("sentence_supported_cosine: empty context");
    std::vector<std::string> batch;
    batch.reserve(context_sentences.size() + 1);
    batch.push_back(sent);
    batch.insert(batch.end(), context_sentences.begin(), context_sentences.end());
    auto vectors = provider.embed(batch);
    for (size_t j = 1; j < vectors.size(); ++j) {
        auto c = safe_cosine(vectors[0], vectors[j]);
        if (c && *c > t1) return true;
    }
    return false;
}

bool sentence_supported_overlap(const std::string& sent,
                                const std::vector<std::string>& context_sentences, double t2,
                                const similarity::OverlapOptions& options) {
    if (context_sentences.empty())
        throw ValidationError("sentence_supported_overlap: empty context");
    TokenSequence s = textproc::tokenize(sent);
    for (const auto& ctx : context_sentences) {
        TokenSequence c = textproc::tokenize(ctx);
        if (s.empty() || c.empty()) continue;
        if (similarity::overlap_ratio(s, c, options) > t2) return true;
    }
    return false;
}

DetectionResult detect_similarity(const corpus::QaTriple& triple, SimilarityMode mode,
                                  const Thresholds& thresholds,
                                  embedding::EmbeddingProvider* provider,
                                  const similarity::OverlapOptions& options) {
    if (triple.answer_sentences.empty())
        throw ValidationError("detect_similarity: triple " + triple.id + " has no answer sentences");
    if (triple.context_sentences.empty())
        throw ValidationError("detect_similarity: triple " + triple.id + " has no context sentences");

    const bool needs_cosine = mode != SimilarityMode::Overlap;
    const bool uses_overlap = mode != SimilarityMode::Cosine;
    if (needs_cosine && !provider)
        throw ValidationError("detect_similarity: cosine mode requires an embedding provider");

    // One provider round-trip for all sentences of the triple.
    std::vector<similarity::EmbeddingVector> vectors;
    if (needs_cosine) {
        std::vector<std::string> batch;
        batch.reserve(triple.answer_sentences.size() + triple.context_sentences.size());
        batch.insert(batch.end(), triple.answer_sentences.begin(), triple.answer_sentences.end());
        batch.insert(batch.end(), triple.context_sentences.begin(),
                     triple.context_sentences.end());
        vectors = provider->embed(batch);
    }
    std::vector<TokenSequence> answer_tokens;
    std::vector<TokenSequence> context_tokens;
    if (uses_overlap) {
        answer_tokens.reserve(triple.answer_sentences.size());
        for (const auto& s : triple.answer_sentences) answer_tokens.push_back(textproc::tokenize(s));
        context_tokens.reserve(triple.context_sentences.size());
        for (const auto& s : triple.context_sentences)
            context_tokens.push_back(textproc::tokenize(s));
    }

    DetectionResult result;
    const size_t n_ctx = triple.context_sentences.size();
    for (size_t i = 0; i < triple.answer_sentences.size(); ++i) {
        SentenceEvidence evidence;
        bool supported = false;

        if (needs_cosine) {
            std::optional<double> best;
            for (size_t j = 0; j < n_ctx; ++j) {
                auto c = safe_cosine(vectors[i], vectors[triple.answer_sentences.size() + j]);
                if (c && (!best || *c > *best)) {
                    best = c;
                    evidence.best_context_index = static_cast<int>(j);
                }
            }
            evidence.cosine = best;
            supported = best && *best > thresholds.t1_cosine;
        }
        // Overlap runs as the only test (Overlap mode) or as the hybrid
        // fallback when the cosine test did not pass.
        if (uses_overlap && !supported) {
            int best_index = -1;
            auto best = max_overlap(answer_tokens[i], context_tokens, options, &best_index);
            evidence.overlap = best;
            if (best && *best > thresholds.t2_overlap) {
                supported = true;
                if (mode == SimilarityMode::Overlap) evidence.best_context_index = best_index;
            } else if (mode == SimilarityMode::Overlap) {
                evidence.best_context_index = best_index;
            }
        }

        if (!supported) result.unsupported_sentence_indices.push_back(i);
        result.per_sentence_evidence.push_back(evidence);
    }
    result.example_label = result.unsupported_sentence_indices.empty()
                               ? corpus::ExampleLabel::NotHallucinated
                               : corpus::ExampleLabel::Hallucinated;
    return result;
}

bool contains_token_sequence(const std::vector<std::string>& haystack,
                             const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    for (size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        if (std::equal(needle.begin(), needle.end(), haystack.begin() + i)) return true;
    }
    return false;
}

DetectionResult detect_keyword(const corpus::QaTriple& triple,
                               const std::vector<std::string>& keywords, double t3) {
    if (keywords.empty()) throw ValidationError("detect_keyword: empty keyword list");

    const auto context_tokens = textproc::tokenize(triple.context_raw).tokens;
    std::vector<std::vector<std::string>> hallucinated;
    for (const auto& keyword : keywords) {
        auto needle = textproc::tokenize(keyword).tokens;
        if (needle.empty()) continue;
        if (!contains_token_sequence(context_tokens, needle))
            hallucinated.push_back(std::move(needle));
    }

    DetectionResult result;
    double ratio = static_cast<double>(hallucinated.size()) / static_cast<double>(keywords.size());
    result.example_label = ratio > t3 ? corpus::ExampleLabel::Hallucinated
                                      : corpus::ExampleLabel::NotHallucinated;
    for (size_t i = 0; i < triple.answer_sentences.size(); ++i) {
        auto sentence_tokens = textproc::tokenize(triple.answer_sentences[i]).tokens;
        for (const auto& needle : hallucinated) {
            if (contains_token_sequence(sentence_tokens, needle)) {
                result.unsupported_sentence_indices.push_back(i);
                break;
            }
        }
    }
    result.per_sentence_evidence.assign(triple.answer_sentences.size(), SentenceEvidence{});
    return result;
}

} // namespace ragcheck::detectors
