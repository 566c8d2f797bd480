#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ragcheck/textproc.hpp"

namespace ragcheck::similarity {

/// Fixed-length real vector produced by an embedding provider.
struct EmbeddingVector {
    std::vector<double> values;

    size_t dim() const { return values.size(); }
};

// Standard cosine similarity. Throws ValidationError on dimension mismatch or
// a zero vector. Result is in [-1, 1] up to rounding.
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

/// Match path from a longest-common-subsequence alignment of two token
/// sequences. Pairs are strictly increasing in both coordinates and each pair
/// joins equal normalized tokens.
struct AlignmentPath {
    std::vector<std::pair<size_t, size_t>> pairs;

    size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
};

// LCS alignment by dynamic programming with a fixed backtrace tie-break:
// prefer a match, then advancing in `a`, then advancing in `b`. Either input
// empty yields an empty path.
AlignmentPath align_lcs(const textproc::TokenSequence& a, const textproc::TokenSequence& b);

struct OverlapOptions {
    // The phrase qualification bound is min(4, ceil(0.3 * L_short)) by
    // default; set use_max_bound for the max(...) reading (sensitivity knob).
    bool use_max_bound = false;
};

// Sentence overlap ratio: align, group the path into phrases (maximal runs
// advancing by one in both sequences), keep phrases longer than the
// qualification bound, and divide the kept token count by the shorter
// sentence's length. Inputs are ordered canonically first so the result
// depends only on the unordered pair. Throws ValidationError on an empty
// sequence. Result clamped to [0, 1].
double overlap_ratio(const textproc::TokenSequence& a, const textproc::TokenSequence& b,
                     const OverlapOptions& options = {});

// Phrase qualification bound for a given shorter-sentence length.
size_t phrase_length_bound(size_t shorter_len, const OverlapOptions& options = {});

} // namespace ragcheck::similarity
