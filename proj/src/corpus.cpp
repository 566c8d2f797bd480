#include "ragcheck/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "ragcheck/errors.hpp"
#include "ragcheck/textproc.hpp"

namespace ragcheck::corpus {
namespace {

std::string fold(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c >= 'A' && c <= 'Z') c = char(c - 'A' + 'a');
        if (c == ' ' || c == '-' || c == '_' || c == '.') continue;
        out.push_back(c);
    }
    return out;
}

// First value present under any of the given keys, or nullptr.
const nlohmann::json* pick(const nlohmann::json& record,
                           std::initializer_list<const char*> keys) {
    for (const char* key : keys) {
        auto it = record.find(key);
        if (it != record.end() && !it->is_null()) return &*it;
    }
    return nullptr;
}

std::vector<std::string> as_string_list(const nlohmann::json& value, const char* what) {
    if (!value.is_array()) throw ValidationError(std::string(what) + " must be a list");
    std::vector<std::string> out;
    out.reserve(value.size());
    for (const auto& item : value) {
        if (!item.is_string()) throw ValidationError(std::string(what) + " must hold strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

} // namespace

std::string to_string(RetrievalMethod m) {
    switch (m) {
        case RetrievalMethod::Sparse: return "sparse";
        case RetrievalMethod::EnsembleTop1: return "ensemble_top1";
        case RetrievalMethod::EnsembleTop3: return "ensemble_top3";
        case RetrievalMethod::AdaptiveEnsemble: return "adaptive_ensemble";
    }
    return "?";
}

std::string to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Dev: return "dev";
        case Split::Test: return "test";
    }
    return "?";
}

std::string to_string(SentenceVerdict v) {
    switch (v) {
        case SentenceVerdict::Supported: return "supported";
        case SentenceVerdict::Conflicted: return "conflicted";
        case SentenceVerdict::Neither: return "neither";
    }
    return "?";
}

std::string to_string(ExampleLabel l) {
    return l == ExampleLabel::Hallucinated ? "hallucinated" : "not_hallucinated";
}

RetrievalMethod parse_retrieval_method(const std::string& text) {
    std::string f = fold(text);
    if (f == "sparse" || f == "lucene" || f == "lucenesearch") return RetrievalMethod::Sparse;
    if (f == "ensembletop1" || f == "top1" || f == "ensembletop1retrieval")
        return RetrievalMethod::EnsembleTop1;
    if (f == "ensembletop3" || f == "top3" || f == "ensembletop3retrieval")
        return RetrievalMethod::EnsembleTop3;
    if (f == "adaptiveensemble" || f == "aensemble" || f == "adaptive")
        return RetrievalMethod::AdaptiveEnsemble;
    throw ValidationError("unknown retrieval method: \"" + text + "\"");
}

Split parse_split(const std::string& text) {
    std::string f = fold(text);
    if (f == "train" || f == "training") return Split::Train;
    if (f == "dev" || f == "development" || f == "valid" || f == "validation")
        return Split::Dev;
    if (f == "test") return Split::Test;
    throw ValidationError("unknown split: \"" + text + "\"");
}

SentenceVerdict parse_sentence_verdict(const std::string& text) {
    std::string f = fold(text);
    if (f == "supported" || f == "support") return SentenceVerdict::Supported;
    if (f == "conflicted" || f == "conflict") return SentenceVerdict::Conflicted;
    if (f == "neither" || f == "neithersupportednorconflicted") return SentenceVerdict::Neither;
    throw ValidationError("unknown sentence verdict: \"" + text + "\"");
}

ExampleLabel parse_example_label(const std::string& text) {
    std::string f = fold(text);
    if (f == "hallucinated" || f == "hallucination" || f == "hal")
        return ExampleLabel::Hallucinated;
    if (f == "nothallucinated" || f == "nohallucination" || f == "nothal" || f == "nhal")
        return ExampleLabel::NotHallucinated;
    throw ValidationError("unknown example label: \"" + text + "\"");
}

std::vector<std::string> adapter_ids() { return {"canonical", "delucionqa"}; }

namespace {

QaTriple parse_with_adapter(const nlohmann::json& record, bool release_aliases) {
    QaTriple t;
    auto field = [&](std::initializer_list<const char*> canonical,
                     std::initializer_list<const char*> release) -> const nlohmann::json* {
        if (const auto* v = pick(record, canonical)) return v;
        if (release_aliases) return pick(record, release);
        return nullptr;
    };

    const auto* id = field({"id"}, {"ID", "Id", "example_id"});
    const auto* question = field({"question"}, {"Question"});
    const auto* context = field({"context"}, {"Context", "retrieval_result", "Retrieval_Result"});
    const auto* answer = field({"answer"}, {"Answer", "Response"});
    const auto* method =
        field({"retrieval_method"}, {"Retrieval_Method", "Search_Method", "method"});
    const auto* split = field({"split"}, {"Split"});
    if (!question) throw ValidationError("record is missing 'question'");
    if (!context) throw ValidationError("record is missing 'context'");
    // The release's unanswerable side set ships (question, context) pairs;
    // the release adapter passes them through with an empty answer.
    if (!answer && !release_aliases) throw ValidationError("record is missing 'answer'");
    if (!method) throw ValidationError("record is missing 'retrieval_method'");
    if (!split) throw ValidationError("record is missing 'split'");

    t.id = id ? (id->is_string() ? id->get<std::string>() : id->dump()) : "";
    t.question = question->get<std::string>();
    t.context_raw = context->get<std::string>();
    t.answer_raw = answer ? answer->get<std::string>() : "";
    t.retrieval_method = parse_retrieval_method(method->get<std::string>());
    t.split = parse_split(split->get<std::string>());

    if (const auto* cs = field({"context_sentences"}, {"Context_Sentences"}))
        t.context_sentences = as_string_list(*cs, "context_sentences");
    else
        t.context_sentences = textproc::split_sentences(t.context_raw);

    if (const auto* as = field({"answer_sentences"}, {"Answer_Sentences", "answer_sents"}))
        t.answer_sentences = as_string_list(*as, "answer_sentences");
    else
        t.answer_sentences = textproc::split_sentences(t.answer_raw);

    if (const auto* labels =
            field({"sentence_labels"}, {"Sentence_Labels", "gold_sentence_labels"})) {
        std::vector<SentenceVerdict> verdicts;
        for (const auto& raw : as_string_list(*labels, "sentence_labels"))
            verdicts.push_back(parse_sentence_verdict(raw));
        t.gold_sentence_labels = std::move(verdicts);
    }
    if (const auto* label = field({"label"}, {"Label", "gold_label", "example_label"}))
        t.gold_example_label = parse_example_label(label->get<std::string>());
    if (const auto* a = field({"answerable"}, {"Answerable"})) t.answerable = a->get<bool>();
    if (const auto* d = field({"does_not_answer"}, {"Does_Not_Answer", "DoesNotAnswer"}))
        t.does_not_answer = d->get<bool>();

    if (t.gold_sentence_labels &&
        t.gold_sentence_labels->size() != t.answer_sentences.size())
        throw ValidationError("sentence label count (" +
                              std::to_string(t.gold_sentence_labels->size()) +
                              ") does not match answer sentence count (" +
                              std::to_string(t.answer_sentences.size()) + ")");
    return t;
}

} // namespace

QaTriple parse_record(const std::string& json_line, const std::string& adapter) {
    bool release_aliases;
    if (adapter == "canonical")
        release_aliases = false;
    else if (adapter == "delucionqa")
        release_aliases = true;
    else
        throw ValidationError("unknown schema adapter: \"" + adapter + "\"");

    nlohmann::json record;
    try {
        record = nlohmann::json::parse(json_line);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed JSON record: ") + e.what());
    }
    if (!record.is_object()) throw ValidationError("record is not a JSON object");
    return parse_with_adapter(record, release_aliases);
}

std::vector<QaTriple> load_dataset(const std::filesystem::path& path,
                                   const std::string& adapter) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open dataset file: " + path.string());

    std::vector<QaTriple> dataset;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            QaTriple t = parse_record(line, adapter);
            if (t.id.empty()) t.id = "line-" + std::to_string(line_no);
            dataset.push_back(std::move(t));
        } catch (const ValidationError& e) {
            throw ValidationError(path.filename().string() + ":" + std::to_string(line_no) +
                                  ": " + e.what());
        }
    }
    return dataset;
}

std::map<Split, SplitCounts> split_counts(const std::vector<QaTriple>& dataset) {
    std::map<Split, SplitCounts> out;
    std::map<Split, std::unordered_set<std::string>> questions;
    for (const auto& t : dataset) {
        if (!t.gold_example_label)
            throw ValidationError("triple " + t.id + " has no gold example label");
        auto& counts = out[t.split];
        ++counts.n_triples;
        if (*t.gold_example_label == ExampleLabel::Hallucinated)
            ++counts.n_hallucinated;
        else
            ++counts.n_not_hallucinated;
        questions[t.split].insert(textproc::normalize_whitespace(t.question));
    }
    for (auto& [split, counts] : out) counts.n_questions = questions[split].size();
    return out;
}

std::map<RetrievalMethod, MethodStats> method_stats(const std::vector<QaTriple>& dataset) {
    struct Accum {
        size_t n = 0;
        size_t hallucinated = 0;
        double sum = 0.0;
        double sum_sq = 0.0;
    };
    std::map<RetrievalMethod, Accum> acc;
    for (const auto& t : dataset) {
        if (!t.gold_example_label)
            throw ValidationError("triple " + t.id + " has no gold example label");
        auto& a = acc[t.retrieval_method];
        ++a.n;
        if (*t.gold_example_label == ExampleLabel::Hallucinated) ++a.hallucinated;
        double tokens = static_cast<double>(textproc::tokenize(t.context_raw).size());
        a.sum += tokens;
        a.sum_sq += tokens * tokens;
    }
    std::map<RetrievalMethod, MethodStats> out;
    for (const auto& [method, a] : acc) {
        MethodStats s;
        s.n_examples = a.n;
        s.hallucinated_pct = a.n ? double(a.hallucinated) / double(a.n) : 0.0;
        s.mean_context_tokens = a.n ? a.sum / double(a.n) : 0.0;
        double var = a.n ? a.sum_sq / double(a.n) - s.mean_context_tokens * s.mean_context_tokens
                         : 0.0;
        s.sd_context_tokens = std::sqrt(std::max(0.0, var));
        out.emplace(method, s);
    }
    return out;
}

DatasetStats dataset_stats(const std::vector<QaTriple>& dataset) {
    DatasetStats stats;
    stats.per_split = split_counts(dataset);
    stats.per_method = method_stats(dataset);
    return stats;
}

std::pair<SentenceVerdict, bool> aggregate_sentence_votes(
    const std::vector<SentenceVerdict>& votes) {
    if (votes.empty()) throw ValidationError("aggregate_sentence_votes: no votes");
    size_t counts[3] = {0, 0, 0};
    for (auto v : votes) ++counts[static_cast<size_t>(v)];
    for (size_t i = 0; i < 3; ++i) {
        if (2 * counts[i] > votes.size())
            return {static_cast<SentenceVerdict>(i), true};
    }
    // No strict majority: surfaced for expert adjudication, not guessed.
    return {SentenceVerdict::Neither, false};
}

ExampleLabel derive_example_label(const std::vector<SentenceVerdict>& sentence_labels,
                                  std::optional<bool> answerable,
                                  std::optional<bool> does_not_answer) {
    if (sentence_labels.empty())
        throw ValidationError("derive_example_label: empty sentence label list");
    if (answerable && !*answerable && does_not_answer && !*does_not_answer)
        return ExampleLabel::Hallucinated;
    bool all_supported =
        std::all_of(sentence_labels.begin(), sentence_labels.end(),
                    [](SentenceVerdict v) { return v == SentenceVerdict::Supported; });
    return all_supported ? ExampleLabel::NotHallucinated : ExampleLabel::Hallucinated;
}

} // namespace ragcheck::corpus
