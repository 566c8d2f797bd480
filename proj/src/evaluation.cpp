#include "ragcheck/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ragcheck/errors.hpp"
#include "ragcheck/llm_gateway.hpp"
#include "ragcheck/textproc.hpp"

namespace ragcheck::evaluation {
namespace {

ClassMetrics metrics_from_counts(size_t tp, size_t fp, size_t fn) {
    ClassMetrics m;
    if (tp + fp == 0) {
        m.degenerate = true;
    } else {
        m.precision = double(tp) / double(tp + fp);
    }
    if (tp + fn == 0) {
        m.degenerate = true;
    } else {
        m.recall = double(tp) / double(tp + fn);
    }
    if (m.precision + m.recall == 0.0) {
        m.f1 = 0.0;
        m.degenerate = true;
    } else {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    return m;
}

} // namespace

EvalReport classification_report(const std::vector<corpus::ExampleLabel>& predictions,
                                 const std::vector<corpus::ExampleLabel>& gold) {
    if (predictions.size() != gold.size())
        throw ValidationError("classification_report: " + std::to_string(predictions.size()) +
                              " predictions vs " + std::to_string(gold.size()) + " gold labels");
    if (predictions.empty()) throw ValidationError("classification_report: empty input");

    EvalReport report;
    report.n = predictions.size();
    for (size_t i = 0; i < predictions.size(); ++i) {
        bool pred_hal = predictions[i] == corpus::ExampleLabel::Hallucinated;
        bool gold_hal = gold[i] == corpus::ExampleLabel::Hallucinated;
        if (pred_hal && gold_hal) ++report.tp;
        else if (!pred_hal && gold_hal) ++report.fn;
        else if (pred_hal && !gold_hal) ++report.fp;
        else ++report.tn;
    }
    report.per_class[corpus::ExampleLabel::Hallucinated] =
        metrics_from_counts(report.tp, report.fp, report.fn);
    report.per_class[corpus::ExampleLabel::NotHallucinated] =
        metrics_from_counts(report.tn, report.fn, report.fp);
    report.macro_f1 = (report.per_class[corpus::ExampleLabel::Hallucinated].f1 +
                       report.per_class[corpus::ExampleLabel::NotHallucinated].f1) /
                      2.0;
    return report;
}

AgreementReport agreement_report(const std::vector<corpus::SentenceVerdict>& reference,
                                 const std::vector<corpus::SentenceVerdict>& candidate) {
    if (reference.size() != candidate.size())
        throw ValidationError("agreement_report: length mismatch");

    AgreementReport report;
    const corpus::SentenceVerdict labels[] = {corpus::SentenceVerdict::Supported,
                                              corpus::SentenceVerdict::Conflicted,
                                              corpus::SentenceVerdict::Neither};
    for (auto label : labels) {
        size_t tp = 0, fp = 0, fn = 0, present = 0;
        for (size_t i = 0; i < reference.size(); ++i) {
            bool in_ref = reference[i] == label;
            bool in_cand = candidate[i] == label;
            if (in_ref || in_cand) ++present;
            if (in_ref && in_cand) ++tp;
            else if (!in_ref && in_cand) ++fp;
            else if (in_ref && !in_cand) ++fn;
        }
        AgreementReport::Entry entry;
        entry.present = present > 0;
        if (entry.present) entry.metrics = metrics_from_counts(tp, fp, fn);
        report.per_label[label] = entry;
    }
    return report;
}

double krippendorff_alpha(
    const std::vector<std::vector<std::optional<std::string>>>& annotations) {
    size_t n_items = 0;
    for (const auto& row : annotations) n_items = std::max(n_items, row.size());

    // Label universe, indexed deterministically.
    std::map<std::string, size_t> label_index;
    for (const auto& row : annotations)
        for (const auto& cell : row)
            if (cell) label_index.emplace(*cell, 0);
    size_t next = 0;
    for (auto& [label, idx] : label_index) idx = next++;
    const size_t n_labels = label_index.size();

    std::vector<double> coincidence(n_labels * n_labels, 0.0);
    size_t pairable_items = 0;
    for (size_t item = 0; item < n_items; ++item) {
        std::vector<size_t> values;
        for (const auto& row : annotations)
            if (item < row.size() && row[item]) values.push_back(label_index.at(*row[item]));
        if (values.size() < 2) continue;
        ++pairable_items;
        double weight = 1.0 / double(values.size() - 1);
        for (size_t a = 0; a < values.size(); ++a)
            for (size_t b = 0; b < values.size(); ++b)
                if (a != b) coincidence[values[a] * n_labels + values[b]] += weight;
    }
    if (pairable_items < 2)
        throw ValidationError("krippendorff_alpha: need at least 2 items with 2+ ratings");

    std::vector<double> margin(n_labels, 0.0);
    double total = 0.0;
    double observed_disagreement = 0.0;
    for (size_t c = 0; c < n_labels; ++c) {
        for (size_t k = 0; k < n_labels; ++k) {
            margin[c] += coincidence[c * n_labels + k];
            if (c != k) observed_disagreement += coincidence[c * n_labels + k];
        }
        total += margin[c];
    }
    double expected_disagreement = 0.0;
    for (size_t c = 0; c < n_labels; ++c)
        for (size_t k = 0; k < n_labels; ++k)
            if (c != k) expected_disagreement += margin[c] * margin[k];
    expected_disagreement /= (total - 1.0);

    if (expected_disagreement == 0.0) {
        // Single label value in play: no variance to disagree about.
        return 1.0;
    }
    return 1.0 - observed_disagreement / expected_disagreement;
}

std::string to_string(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::Cosine: return "cosine";
        case DetectorKind::Overlap: return "overlap";
        case DetectorKind::Hybrid: return "hybrid";
        case DetectorKind::Keyword: return "keyword";
    }
    return "?";
}

DetectorKind parse_detector_kind(const std::string& text) {
    std::string lowered;
    for (char c : text) lowered.push_back(c >= 'A' && c <= 'Z' ? char(c - 'A' + 'a') : c);
    if (lowered == "cosine" || lowered == "sim-cosine") return DetectorKind::Cosine;
    if (lowered == "overlap" || lowered == "sim-overlap") return DetectorKind::Overlap;
    if (lowered == "hybrid" || lowered == "sim-hybrid") return DetectorKind::Hybrid;
    if (lowered == "keyword" || lowered == "keyword-match") return DetectorKind::Keyword;
    throw ValidationError("unknown detector: \"" + text + "\"");
}

namespace {

// Per-triple score summaries so each grid point is a cheap thresholding pass.
struct TripleScores {
    corpus::ExampleLabel gold;
    std::vector<double> max_cosine;  // per answer sentence; -1 when undefined
    std::vector<double> max_overlap; // per answer sentence
    double keyword_ratio = 0.0;
};

corpus::ExampleLabel predict(const TripleScores& scores, DetectorKind kind,
                             const detectors::Thresholds& t) {
    if (kind == DetectorKind::Keyword)
        return scores.keyword_ratio > t.t3_keyword ? corpus::ExampleLabel::Hallucinated
                                                   : corpus::ExampleLabel::NotHallucinated;
    size_t n = std::max(scores.max_cosine.size(), scores.max_overlap.size());
    for (size_t i = 0; i < n; ++i) {
        bool supported = false;
        if (kind != DetectorKind::Overlap && scores.max_cosine[i] > t.t1_cosine)
            supported = true;
        if (!supported && kind != DetectorKind::Cosine && scores.max_overlap[i] > t.t2_overlap)
            supported = true;
        if (!supported) return corpus::ExampleLabel::Hallucinated;
    }
    return corpus::ExampleLabel::NotHallucinated;
}

} // namespace

TuneResult tune_thresholds(DetectorKind kind, const std::vector<corpus::QaTriple>& dev_set,
                           const std::vector<double>& grid,
                           embedding::EmbeddingProvider* provider, const KeywordSource& keywords,
                           const similarity::OverlapOptions& options) {
    if (dev_set.empty()) throw ValidationError("tune_thresholds: empty dev set");
    if (grid.empty()) throw ValidationError("tune_thresholds: empty grid");
    const bool needs_cosine = kind == DetectorKind::Cosine || kind == DetectorKind::Hybrid;
    const bool needs_overlap = kind == DetectorKind::Overlap || kind == DetectorKind::Hybrid;
    if (needs_cosine && !provider)
        throw ValidationError("tune_thresholds: cosine-based tuning requires a provider");

    KeywordSource keyword_source = keywords;
    if (kind == DetectorKind::Keyword && !keyword_source)
        keyword_source = [](const corpus::QaTriple& triple) {
            return llm_gateway::fallback_keywords(triple.answer_raw).keywords;
        };

    std::vector<double> sorted_grid = grid;
    std::sort(sorted_grid.begin(), sorted_grid.end());

    std::vector<TripleScores> scores;
    scores.reserve(dev_set.size());
    std::vector<corpus::ExampleLabel> gold;
    gold.reserve(dev_set.size());
    for (const auto& triple : dev_set) {
        if (!triple.gold_example_label)
            throw ValidationError("tune_thresholds: triple " + triple.id + " has no gold label");
        TripleScores ts;
        ts.gold = *triple.gold_example_label;
        gold.push_back(ts.gold);
        if (needs_cosine || needs_overlap) {
            if (triple.answer_sentences.empty() || triple.context_sentences.empty())
                throw ValidationError("tune_thresholds: triple " + triple.id +
                                      " has empty answer or context sentences");
            size_t n_ans = triple.answer_sentences.size();
            ts.max_cosine.assign(n_ans, -1.0);
            ts.max_overlap.assign(n_ans, -1.0);
            if (needs_cosine) {
                std::vector<std::string> batch;
                batch.insert(batch.end(), triple.answer_sentences.begin(),
                             triple.answer_sentences.end());
                batch.insert(batch.end(), triple.context_sentences.begin(),
                             triple.context_sentences.end());
                auto vectors = provider->embed(batch);
                for (size_t i = 0; i < n_ans; ++i) {
                    for (size_t j = 0; j < triple.context_sentences.size(); ++j) {
                        const auto& u = vectors[i];
                        const auto& v = vectors[n_ans + j];
                        double dot = 0, nu = 0, nv = 0;
                        for (size_t d = 0; d < u.values.size(); ++d) {
                            dot += u.values[d] * v.values[d];
                            nu += u.values[d] * u.values[d];
                            nv += v.values[d] * v.values[d];
                        }
                        if (nu == 0 || nv == 0) continue;
                        ts.max_cosine[i] =
                            std::max(ts.max_cosine[i], dot / (std::sqrt(nu) * std::sqrt(nv)));
                    }
                }
            }
            if (needs_overlap) {
                std::vector<textproc::TokenSequence> ctx;
                for (const auto& s : triple.context_sentences) ctx.push_back(textproc::tokenize(s));
                for (size_t i = 0; i < n_ans; ++i) {
                    auto ans = textproc::tokenize(triple.answer_sentences[i]);
                    for (const auto& c : ctx) {
                        if (ans.empty() || c.empty()) continue;
                        ts.max_overlap[i] =
                            std::max(ts.max_overlap[i], similarity::overlap_ratio(ans, c, options));
                    }
                }
            }
        }
        if (kind == DetectorKind::Keyword) {
            auto kws = keyword_source(triple);
            if (kws.empty()) {
                ts.keyword_ratio = 0.0; // nothing extractable, nothing to flag
            } else {
                auto context_tokens = textproc::tokenize(triple.context_raw).tokens;
                size_t missing = 0;
                for (const auto& kw : kws) {
                    auto needle = textproc::tokenize(kw).tokens;
                    if (!needle.empty() &&
                        !detectors::contains_token_sequence(context_tokens, needle))
                        ++missing;
                }
                ts.keyword_ratio = double(missing) / double(kws.size());
            }
        }
        scores.push_back(std::move(ts));
    }

    auto evaluate_point = [&](const detectors::Thresholds& t) {
        std::vector<corpus::ExampleLabel> predictions;
        predictions.reserve(scores.size());
        for (const auto& ts : scores) predictions.push_back(predict(ts, kind, t));
        return classification_report(predictions, gold).macro_f1;
    };

    TuneResult result;
    bool first = true;
    auto consider = [&](const detectors::Thresholds& t) {
        double macro = evaluate_point(t);
        result.surface.push_back({t, macro});
        if (first || macro > result.best_macro_f1) {
            result.best = t;
            result.best_macro_f1 = macro;
            first = false;
        }
    };

    detectors::Thresholds base; // defaults for the untuned dimensions
    if (kind == DetectorKind::Hybrid) {
        for (double t1 : sorted_grid) {
            for (double t2 : sorted_grid) {
                detectors::Thresholds t = base;
                t.t1_cosine = t1;
                t.t2_overlap = t2;
                consider(t);
            }
        }
    } else {
        for (double v : sorted_grid) {
            detectors::Thresholds t = base;
            if (kind == DetectorKind::Cosine) t.t1_cosine = v;
            else if (kind == DetectorKind::Overlap) t.t2_overlap = v;
            else t.t3_keyword = v;
            consider(t);
        }
    }
    return result;
}

} // namespace ragcheck::evaluation
