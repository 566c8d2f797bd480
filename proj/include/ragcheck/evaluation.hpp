#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ragcheck/corpus.hpp"
#include "ragcheck/detectors.hpp"

namespace ragcheck::evaluation {

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // Set when a denominator was zero (class absent from gold and/or
    // predictions); the metric is reported as 0 by convention.
    bool degenerate = false;
};

/// Binary classification report with Hallucinated as the positive class.
struct EvalReport {
    std::map<corpus::ExampleLabel, ClassMetrics> per_class;
    double macro_f1 = 0.0; // unweighted mean of the two class F1s
    size_t tp = 0, fn = 0, fp = 0, tn = 0;
    size_t n = 0;
};

EvalReport classification_report(const std::vector<corpus::ExampleLabel>& predictions,
                                 const std::vector<corpus::ExampleLabel>& gold);

/// Sentence-label agreement, reference treated as ground truth. Labels absent
/// from both lists are omitted (`present` false).
struct AgreementReport {
    struct Entry {
        bool present = false;
        ClassMetrics metrics;
    };
    std::map<corpus::SentenceVerdict, Entry> per_label;
};

AgreementReport agreement_report(const std::vector<corpus::SentenceVerdict>& reference,
                                 const std::vector<corpus::SentenceVerdict>& candidate);

// Krippendorff's alpha for nominal data via the standard coincidence matrix.
// `annotations[annotator][item]` with nullopt for a missing rating. Requires
// at least two items rated by two or more annotators.
double krippendorff_alpha(
    const std::vector<std::vector<std::optional<std::string>>>& annotations);

enum class DetectorKind { Cosine, Overlap, Hybrid, Keyword };

std::string to_string(DetectorKind kind);
DetectorKind parse_detector_kind(const std::string& text);

struct SurfacePoint {
    detectors::Thresholds thresholds;
    double macro_f1 = 0.0;
};

struct TuneResult {
    detectors::Thresholds best;
    double best_macro_f1 = 0.0;
    std::vector<SurfacePoint> surface; // grid order: ascending thresholds
};

// Per-triple keyword source for Keyword tuning/detection.
using KeywordSource =
    std::function<std::vector<std::string>(const corpus::QaTriple&)>;

// Exhaustive grid search maximizing macro F1 on a labeled dev set. Cosine,
// Overlap and Keyword search the 1-D grid; Hybrid searches the (t1, t2)
// product grid. Ties break toward the lowest threshold (lexicographic for
// pairs). Deterministic: same inputs, same surface, bit for bit.
TuneResult tune_thresholds(DetectorKind kind, const std::vector<corpus::QaTriple>& dev_set,
                           const std::vector<double>& grid,
                           embedding::EmbeddingProvider* provider = nullptr,
                           const KeywordSource& keywords = {},
                           const similarity::OverlapOptions& options = {});

} // namespace ragcheck::evaluation
