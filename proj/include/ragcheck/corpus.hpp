#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ragcheck::corpus {

enum class RetrievalMethod { Sparse, EnsembleTop1, EnsembleTop3, AdaptiveEnsemble };
enum class Split { Train, Dev, Test };
enum class SentenceVerdict { Supported, Conflicted, Neither };
enum class ExampleLabel { Hallucinated, NotHallucinated };

std::string to_string(RetrievalMethod m);
std::string to_string(Split s);
std::string to_string(SentenceVerdict v);
std::string to_string(ExampleLabel l);

// Tolerant parsers: case-insensitive, accepting the canonical token plus the
// spellings seen in released data ("Ensemble Top-1", "A - Ensemble", ...).
// Throw ValidationError on unknown values.
RetrievalMethod parse_retrieval_method(const std::string& text);
Split parse_split(const std::string& text);
SentenceVerdict parse_sentence_verdict(const std::string& text);
ExampleLabel parse_example_label(const std::string& text);

/// One (question, context, answer) example with optional gold annotations.
struct QaTriple {
    std::string id;
    std::string question;
    std::string context_raw;
    std::vector<std::string> context_sentences;
    std::string answer_raw;
    std::vector<std::string> answer_sentences;
    RetrievalMethod retrieval_method = RetrievalMethod::Sparse;
    Split split = Split::Train;
    std::optional<std::vector<SentenceVerdict>> gold_sentence_labels;
    std::optional<ExampleLabel> gold_example_label;
    std::optional<bool> answerable;
    std::optional<bool> does_not_answer;
};

struct SplitCounts {
    size_t n_questions = 0;
    size_t n_triples = 0;
    size_t n_hallucinated = 0;
    size_t n_not_hallucinated = 0;
};

struct MethodStats {
    double hallucinated_pct = 0.0; // fraction in [0, 1]
    size_t n_examples = 0;
    double mean_context_tokens = 0.0;
    double sd_context_tokens = 0.0; // population standard deviation
};

struct DatasetStats {
    std::map<Split, SplitCounts> per_split;
    std::map<RetrievalMethod, MethodStats> per_method;
};

// Known input schemas for load_dataset. "canonical" expects the field names
// of QaTriple; "delucionqa" additionally accepts the capitalized aliases used
// by the public release files.
std::vector<std::string> adapter_ids();

// Loads a line-delimited JSON dataset, one record per line. Sentence lists
// are preserved when the record ships them and derived with
// textproc::split_sentences otherwise. Errors carry the 1-based line number.
std::vector<QaTriple> load_dataset(const std::filesystem::path& path,
                                   const std::string& adapter = "canonical");

// Parses one record (exposed for tests and the python bindings).
QaTriple parse_record(const std::string& json_line, const std::string& adapter = "canonical");

// Exact per-split accounting. Questions are counted unique per split by exact
// string equality after whitespace normalization. Requires gold example
// labels on every triple.
std::map<Split, SplitCounts> split_counts(const std::vector<QaTriple>& dataset);

// Per-retrieval-method hallucination percentage and context token statistics
// (token counts via textproc::tokenize over context_raw).
std::map<RetrievalMethod, MethodStats> method_stats(const std::vector<QaTriple>& dataset);

// Both accounting views in one pass-friendly bundle.
DatasetStats dataset_stats(const std::vector<QaTriple>& dataset);

// Strict-majority vote. Returns consensus=false (with verdict Neither, the
// adjudication marker) when no label holds more than half the votes.
std::pair<SentenceVerdict, bool> aggregate_sentence_votes(
    const std::vector<SentenceVerdict>& votes);

// Example-level label rule: NotHallucinated iff every sentence is Supported;
// any Neither or Conflicted makes it Hallucinated; and an unanswerable
// context that the answer does not decline (answerable=false,
// does_not_answer=false) forces Hallucinated regardless of sentence labels.
ExampleLabel derive_example_label(const std::vector<SentenceVerdict>& sentence_labels,
                                  std::optional<bool> answerable = std::nullopt,
                                  std::optional<bool> does_not_answer = std::nullopt);

} // namespace ragcheck::corpus
