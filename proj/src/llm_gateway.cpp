#include "ragcheck/llm_gateway.hpp"

#include <cstdlib>
#include <fstream>

#include <httplib.h>
#include <json.hpp>

#include "ragcheck/errors.hpp"
#include "ragcheck/sha256.hpp"
#include "ragcheck/textproc.hpp"

namespace ragcheck::llm_gateway {
namespace {

constexpr const char* kSystemDefault = "You are a helpful and kind AI Assistant.";
constexpr const char* kSystemStepByStep =
    "You are a helpful and kind AI Assistant. If there is multiple answer/reasons depending "
    "on the situation you can ask for my situation and provide answers/reasons step-by-step "
    "as a list.";
constexpr const char* kKeywordSuffix = " Given the paragraph above, show the keywords in it:";

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_begin = endpoint.find('/', host_begin);
    if (path_begin == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_begin), endpoint.substr(path_begin)};
}

} // namespace

size_t context_sentence_limit() { return 40; }

PromptBundle build_answer_prompt(corpus::RetrievalMethod method, const std::string& question,
                                 const std::string& context) {
    size_t n_sentences = textproc::split_sentences(context).size();
    if (n_sentences > context_sentence_limit())
        throw ValidationError("context has " + std::to_string(n_sentences) +
                              " sentences; the limit is " +
                              std::to_string(context_sentence_limit()));

    PromptBundle bundle;
    bundle.method_tag = method;
    switch (method) {
        case corpus::RetrievalMethod::Sparse:
            bundle.system_message = kSystemDefault;
            bundle.user_message = context + "\n\n" + "Q: " + question + "\n" + "A:";
            break;
        case corpus::RetrievalMethod::EnsembleTop1:
        case corpus::RetrievalMethod::EnsembleTop3:
            bundle.system_message = kSystemDefault;
            bundle.user_message = "Given the context: \n" + context + "\n\n" +
                                  "Please answer the question:\n" + question;
            break;
        case corpus::RetrievalMethod::AdaptiveEnsemble:
            bundle.system_message = kSystemStepByStep;
            bundle.user_message = context + "\n\n" + "Q: " + question + "\n" + "A:";
            break;
    }
    return bundle;
}

PromptBundle build_keyword_prompt(const std::string& answer) {
    if (answer.empty()) throw ValidationError("build_keyword_prompt: empty answer");
    PromptBundle bundle;
    bundle.system_message = kSystemDefault;
    bundle.user_message = answer + kKeywordSuffix;
    return bundle;
}

ChatMode parse_chat_mode(const std::string& text) {
    std::string lowered;
    for (char c : text) lowered.push_back(c >= 'A' && c <= 'Z' ? char(c - 'A' + 'a') : c);
    if (lowered == "live") return ChatMode::Live;
    if (lowered == "record") return ChatMode::Record;
    if (lowered == "replay") return ChatMode::Replay;
    throw ValidationError("unknown chat mode: \"" + text + "\"");
}

std::string to_string(ChatMode mode) {
    switch (mode) {
        case ChatMode::Live: return "live";
        case ChatMode::Record: return "record";
        case ChatMode::Replay: return "replay";
    }
    return "?";
}

ChatClient::ChatClient(ChatConfig config) : config_(std::move(config)) {
    if (config_.mode != ChatMode::Replay && config_.endpoint.empty())
        throw ValidationError("chat client: live/record mode requires an endpoint");
    if (config_.mode != ChatMode::Live && config_.cache_dir.empty())
        throw ValidationError("chat client: record/replay mode requires a cache directory");
}

std::string ChatClient::bundle_key(const PromptBundle& bundle, const std::string& model) {
    // \x1f separators keep ("ab","c") and ("a","bc") from colliding.
    return sha256_hex(bundle.system_message + '\x1f' + bundle.user_message + '\x1f' + model);
}

std::string ChatClient::chat(const PromptBundle& bundle) {
    const std::string key = bundle_key(bundle, config_.model);
    const std::filesystem::path record_path =
        config_.cache_dir.empty() ? std::filesystem::path{}
                                  : config_.cache_dir / (key + ".json");

    if (config_.mode == ChatMode::Replay) {
        std::ifstream in(record_path);
        if (!in)
            throw OperationError("chat replay cache miss: " + record_path.string());
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw OperationError("corrupt chat cache record " + record_path.string() + ": " +
                                 e.what());
        }
        return doc.at("text").get<std::string>();
    }

    auto [host, path] = split_endpoint(config_.endpoint);
    httplib::Client client(host);
    client.set_read_timeout(120, 0);
    if (!config_.credential_env.empty()) {
        const char* token = std::getenv(config_.credential_env.c_str());
        if (!token)
            throw OperationError("credential env var not set: " + config_.credential_env);
        client.set_default_headers({{"Authorization", std::string("Bearer ") + token}});
    }
    nlohmann::json request = {{"system", bundle.system_message},
                              {"user", bundle.user_message},
                              {"model", config_.model}};
    if (config_.temperature) request["temperature"] = *config_.temperature;
    auto res = client.Post(path, request.dump(), "application/json");
    if (!res) throw OperationError("chat endpoint unreachable: " + config_.endpoint);
    if (res->status != 200)
        throw OperationError("chat endpoint error " + std::to_string(res->status) + ": " +
                             res->body);
    std::string text;
    try {
        text = nlohmann::json::parse(res->body).at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw OperationError(std::string("chat endpoint returned invalid JSON: ") + e.what());
    }

    if (config_.mode == ChatMode::Record) {
        std::filesystem::create_directories(config_.cache_dir);
        std::filesystem::path tmp = record_path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp);
            if (!out) throw OperationError("cannot write chat cache: " + tmp.string());
            nlohmann::json doc = {{"system", bundle.system_message},
                                  {"user", bundle.user_message},
                                  {"model", config_.model},
                                  {"text", text}};
            out << doc.dump(2);
        }
        std::filesystem::rename(tmp, record_path);
    }
    return text;
}

std::vector<std::string> parse_keyword_response(const std::string& text) {
    std::vector<std::string> keywords;
    std::vector<std::string> seen_folded;
    std::string current;
    auto flush = [&]() {
        // Strip whitespace, bullets and list numbering.
        size_t begin = 0, end = current.size();
        while (begin < end && (current[begin] == ' ' || current[begin] == '\t')) ++begin;
        while (begin < end && (current[begin] == '-' || current[begin] == '*' ||
                               current[begin] == '.' || current[begin] == ')' ||
                               (current[begin] >= '0' && current[begin] <= '9')))
            ++begin;
        while (begin < end && (current[begin] == ' ' || current[begin] == '\t')) ++begin;
        while (end > begin && (current[end - 1] == ' ' || current[end - 1] == '\t' ||
                               current[end - 1] == '.' || current[end - 1] == '\r'))
            --end;
        if (end > begin) {
            std::string keyword = current.substr(begin, end - begin);
            std::string folded;
            for (char c : keyword)
                folded.push_back(c >= 'A' && c <= 'Z' ? char(c - 'A' + 'a') : c);
            if (std::find(seen_folded.begin(), seen_folded.end(), folded) ==
                seen_folded.end()) {
                seen_folded.push_back(folded);
                keywords.push_back(std::move(keyword));
            }
        }
        current.clear();
    };
    for (char c : text) {
        if (c == ',' || c == '\n' || c == ';') flush();
        else current.push_back(c);
    }
    flush();
    return keywords;
}

FallbackKeywords fallback_keywords(const std::string& answer) {
    if (answer.empty()) throw ValidationError("fallback_keywords: empty answer");
    FallbackKeywords result;
    std::vector<std::string> seen;
    auto push_unique = [&](std::string keyword) {
        if (std::find(seen.begin(), seen.end(), keyword) == seen.end()) {
            seen.push_back(keyword);
            result.keywords.push_back(std::move(keyword));
        }
    };

    auto tokens = textproc::tokenize(answer);
    bool had_tokens = !tokens.empty();
    for (const auto& token : tokens.tokens)
        if (!textproc::is_stopword(token)) push_unique(token);

    // Capitalized runs of two or more words in the raw text become phrase
    // keywords ("Uconnect Voice Recognition" -> "uconnect voice recognition").
    std::vector<std::string> raw_words;
    std::string word;
    for (char c : answer) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            if (!word.empty()) raw_words.push_back(std::exchange(word, {}));
        } else {
            word.push_back(c);
        }
    }
    if (!word.empty()) raw_words.push_back(word);

    auto is_capitalized = [](const std::string& w) {
        for (char c : w)
            if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'))
                return c >= 'A' && c <= 'Z';
        return false;
    };
    size_t run_start = 0;
    size_t run_len = 0;
    auto flush_run = [&](size_t end) {
        if (run_len >= 2) {
            std::string phrase;
            for (size_t i = run_start; i < end; ++i) {
                std::string norm = textproc::normalize_token(raw_words[i]);
                if (norm.empty()) continue;
                if (!phrase.empty()) phrase.push_back(' ');
                phrase += norm;
            }
            if (!phrase.empty()) push_unique(phrase);
        }
        run_len = 0;
    };
    for (size_t i = 0; i < raw_words.size(); ++i) {
        if (is_capitalized(raw_words[i])) {
            if (run_len == 0) run_start = i;
            ++run_len;
        } else {
            flush_run(i);
        }
    }
    flush_run(raw_words.size());

    result.all_stopwords = had_tokens && result.keywords.empty();
    return result;
}

} // namespace ragcheck::llm_gateway
