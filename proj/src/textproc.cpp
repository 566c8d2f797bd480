#include "ragcheck/textproc.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace ragcheck::textproc {
namespace {

inline bool ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
inline bool ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
inline bool ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline bool ascii_alnum(char c) {
    return ascii_digit(c) || ascii_upper(c) || (c >= 'a' && c <= 'z');
}
inline char ascii_lower(char c) { return ascii_upper(c) ? char(c - 'A' + 'a') : c; }

// Words that commonly precede a period without ending the sentence.
// Compared lowercase, without the trailing period.
const std::array<std::string_view, 18> kAbbreviations = {
    "e.g", "i.e", "etc", "cf", "vs", "mr", "mrs", "ms", "dr", "prof",
    "fig", "no", "st", "approx", "dept", "inc", "min", "max"};

bool is_abbreviation(std::string_view word) {
    // Opening punctuation does not change what the word is: "(approx" == "approx".
    while (!word.empty() && !ascii_alnum(word.front())) word.remove_prefix(1);
    std::string lowered;
    lowered.reserve(word.size());
    for (char c : word) lowered.push_back(ascii_lower(c));
    return std::find(kAbbreviations.begin(), kAbbreviations.end(), lowered) !=
           kAbbreviations.end();
}

// The word immediately before position `pos` (exclusive), with the char at
// pos-? being the terminal punctuation; used for the abbreviation guard.
std::string_view word_before(std::string_view text, size_t punct_pos) {
    size_t end = punct_pos;
    size_t begin = end;
    while (begin > 0 && !ascii_space(text[begin - 1])) --begin;
    return text.substr(begin, end - begin);
}

void flush_sentence(std::vector<std::string>& out, std::string_view text, size_t begin,
                    size_t end) {
    while (begin < end && ascii_space(text[begin])) ++begin;
    while (end > begin && ascii_space(text[end - 1])) --end;
    if (end > begin) out.emplace_back(text.substr(begin, end - begin));
}

} // namespace

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> sentences;
    size_t start = 0;
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (c == '\n') {
            flush_sentence(sentences, text, start, i);
            start = i + 1;
            ++i;
            continue;
        }
        if (c == '.' || c == '!' || c == '?') {
            // Swallow a run of terminal punctuation plus closing quotes/brackets.
            size_t j = i + 1;
            while (j < n && (text[j] == '.' || text[j] == '!' || text[j] == '?' ||
                             text[j] == '"' || text[j] == '\'' || text[j] == ')' ||
                             text[j] == ']'))
                ++j;
            size_t k = j;
            while (k < n && text[k] != '\n' && ascii_space(text[k])) ++k;
            bool boundary = k > j && k < n && (ascii_upper(text[k]) || ascii_digit(text[k]));
            if (boundary && c == '.' && is_abbreviation(word_before(text, i))) boundary = false;
            if (boundary) {
                flush_sentence(sentences, text, start, j);
                start = k;
                i = k;
                continue;
            }
            i = j;
            continue;
        }
        ++i;
    }
    flush_sentence(sentences, text, start, n);
    return sentences;
}

std::string normalize_token(std::string_view token) {
    size_t begin = 0;
    size_t end = token.size();
    while (begin < end && !ascii_alnum(token[begin])) ++begin;
    while (end > begin && !ascii_alnum(token[end - 1])) --end;
    std::string out;
    out.reserve(end - begin);
    for (size_t i = begin; i < end; ++i) out.push_back(ascii_lower(token[i]));
    return out;
}

TokenSequence tokenize(std::string_view sentence) {
    TokenSequence seq;
    seq.spans.emplace();
    size_t i = 0;
    const size_t n = sentence.size();
    while (i < n) {
        while (i < n && ascii_space(sentence[i])) ++i;
        size_t begin = i;
        while (i < n && !ascii_space(sentence[i])) ++i;
        if (i == begin) break;
        std::string tok = normalize_token(sentence.substr(begin, i - begin));
        if (!tok.empty()) {
            seq.tokens.push_back(std::move(tok));
            seq.spans->emplace_back(begin, i);
        }
    }
    return seq;
}

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_space = true; // leading whitespace dropped
    for (char c : text) {
        if (ascii_space(c)) {
            in_space = true;
        } else {
            if (in_space && !out.empty()) out.push_back(' ');
            out.push_back(c);
            in_space = false;
        }
    }
    return out;
}

const std::vector<std::string>& stopwords() {
    static const std::vector<std::string> kList = {
        "a",     "about", "above", "after", "again", "all",   "an",    "and",
        "any",   "are",   "as",    "at",    "be",    "been",  "both",  "but",
        "by",    "can",   "could", "did",   "do",    "does",  "done",  "down",
        "each",  "few",   "for",   "from",  "further", "had", "has",   "have",
        "he",    "her",   "here",  "his",   "how",   "i",     "if",    "in",
        "into",  "is",    "it",    "its",   "may",   "might", "more",  "most",
        "must",  "no",    "nor",   "not",   "of",    "off",   "on",    "once",
        "only",  "or",    "other", "our",   "out",   "over",  "own",   "same",
        "shall", "she",   "should", "so",   "some",  "such",  "than",  "that",
        "the",   "their", "them",  "then",  "there", "these", "they",  "this",
        "those", "to",    "too",   "under", "until", "up",    "very",  "was",
        "we",    "were",  "what",  "when",  "where", "which", "while", "who",
        "whom",  "whose", "why",   "will",  "with",  "would", "you",   "your"};
    return kList;
}

bool is_stopword(std::string_view token) {
    const auto& list = stopwords();
    return std::binary_search(list.begin(), list.end(), token);
}

} // namespace ragcheck::textproc
