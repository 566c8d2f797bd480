#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ragcheck::textproc {

/// A normalized token stream. Tokens are lowercase, edge-punctuation-free and
/// never empty; `spans` (when present) holds per-token (start, end) character
/// offsets into the source string.
struct TokenSequence {
    std::vector<std::string> tokens;
    std::optional<std::vector<std::pair<size_t, size_t>>> spans;

    size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }
};

// Rule-based sentence segmentation. A boundary is a terminal `.`, `!` or `?`
// followed by whitespace and an uppercase letter or digit, unless the word in
// front of the period is a guarded abbreviation. Newlines are hard boundaries.
// Deterministic; never emits an empty sentence; "" yields an empty list.
std::vector<std::string> split_sentences(std::string_view text);

// Lowercase, whitespace-split, punctuation stripped from token edges.
// Hyphenated words stay whole; numbers are kept. Idempotent under rejoin.
TokenSequence tokenize(std::string_view sentence);

// Normalization applied to a single token (the tokenize() per-token step).
std::string normalize_token(std::string_view token);

// Trim plus collapse of internal whitespace runs to a single space. Used for
// question-identity comparisons.
std::string normalize_whitespace(std::string_view text);

// The fixed stopword list shared by the keyword fallback extractor and the
// (optional) BM25 stopword filter. Sorted, lowercase.
const std::vector<std::string>& stopwords();
bool is_stopword(std::string_view token);

} // namespace ragcheck::textproc
