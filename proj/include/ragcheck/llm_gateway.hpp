#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ragcheck/corpus.hpp"

namespace ragcheck::llm_gateway {

struct PromptBundle {
    std::string system_message;
    std::string user_message;
    std::optional<corpus::RetrievalMethod> method_tag;
};

// Answer-generation prompt for a retrieval method. Sparse and adaptive use
// the Q+A body; the ensemble methods use the verbose body; adaptive swaps in
// the step-by-step system message. Contexts longer than 40 sentences are
// rejected (ValidationError).
PromptBundle build_answer_prompt(corpus::RetrievalMethod method, const std::string& question,
                                 const std::string& context);

// Keyword-extraction prompt: the answer paragraph followed by the fixed
// instruction suffix. Empty answer is rejected.
PromptBundle build_keyword_prompt(const std::string& answer);

size_t context_sentence_limit(); // 40

enum class ChatMode { Live, Record, Replay };

ChatMode parse_chat_mode(const std::string& text);
std::string to_string(ChatMode mode);

struct ChatConfig {
    std::string endpoint;       // e.g. "http://host:port/chat"
    std::string model;
    std::string credential_env; // name of the env var holding the bearer token
    std::filesystem::path cache_dir;
    ChatMode mode = ChatMode::Replay;
    std::optional<double> temperature; // passed through when set
};

// Chat completion client over the wire contract
//   request:  {"system": string, "user": string, "model": string}
//   response: {"text": string}
// Record stores responses under cache_dir keyed by a content hash of the
// bundle; Replay serves them back without network and errors on a miss.
class ChatClient {
public:
    explicit ChatClient(ChatConfig config);
    std::string chat(const PromptBundle& bundle);

    // Content hash identifying a bundle in the cache directory.
    static std::string bundle_key(const PromptBundle& bundle, const std::string& model);

private:
    ChatConfig config_;
};

// Splits an LLM keyword-listing response on commas and newlines, stripping
// leading bullets and numbering. Deduplicates case-insensitively.
std::vector<std::string> parse_keyword_response(const std::string& text);

struct FallbackKeywords {
    std::vector<std::string> keywords;
    bool all_stopwords = false; // answer had tokens but none survived the filter
};

// Deterministic keyword extraction: normalized answer tokens minus stopwords,
// first-occurrence order, plus capitalized multi-token spans from the raw
// text as phrase keywords.
FallbackKeywords fallback_keywords(const std::string& answer);

} // namespace ragcheck::llm_gateway
