#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ragcheck/corpus.hpp"
#include "ragcheck/detectors.hpp"
#include "ragcheck/embedding.hpp"
#include "ragcheck/errors.hpp"
#include "ragcheck/evaluation.hpp"
#include "ragcheck/llm_gateway.hpp"
#include "ragcheck/retrieval.hpp"
#include "ragcheck/similarity.hpp"
#include "ragcheck/textproc.hpp"

namespace py = pybind11;
using namespace ragcheck;

namespace {

similarity::EmbeddingVector to_vector(const std::vector<double>& values) {
    return similarity::EmbeddingVector{values};
}

textproc::TokenSequence to_tokens(const std::vector<std::string>& tokens) {
    textproc::TokenSequence seq;
    seq.tokens = tokens;
    return seq;
}

py::dict eval_report_dict(const evaluation::EvalReport& report) {
    py::dict per_class;
    for (const auto& [label, metrics] : report.per_class) {
        py::dict entry;
        entry["precision"] = metrics.precision;
        entry["recall"] = metrics.recall;
        entry["f1"] = metrics.f1;
        entry["degenerate"] = metrics.degenerate;
        per_class[py::str(corpus::to_string(label))] = entry;
    }
    py::dict out;
    out["per_class"] = per_class;
    out["macro_f1"] = report.macro_f1;
    out["n"] = report.n;
    py::dict confusion;
    confusion["tp"] = report.tp;
    confusion["fn"] = report.fn;
    confusion["fp"] = report.fp;
    confusion["tn"] = report.tn;
    out["confusion"] = confusion;
    return out;
}

py::dict detection_dict(const detectors::DetectionResult& result) {
    py::dict out;
    out["label"] = corpus::to_string(result.example_label);
    out["unsupported_indices"] = result.unsupported_sentence_indices;
    py::list evidence;
    for (const auto& e : result.per_sentence_evidence) {
        py::dict entry;
        entry["best_context"] = e.best_context_index;
        entry["cosine"] = e.cosine ? py::object(py::float_(*e.cosine)) : py::none();
        entry["overlap"] = e.overlap ? py::object(py::float_(*e.overlap)) : py::none();
        evidence.append(entry);
    }
    out["evidence"] = evidence;
    return out;
}

} // namespace

PYBIND11_MODULE(_ragcheck, m) {
    m.doc() = "hallucination detection and retrieval toolkit for grounded QA";
    m.attr("__version__") = RAGCHECK_VERSION;

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<OperationError>(m, "OperationError", PyExc_RuntimeError);

    // text processing
    m.def("split_sentences",
          [](const std::string& text) { return textproc::split_sentences(text); },
          py::arg("text"), "Rule-based sentence segmentation.");
    m.def("tokenize",
          [](const std::string& text) { return textproc::tokenize(text).tokens; },
          py::arg("text"), "Lowercased, edge-punctuation-stripped tokens.");

    // similarity kernels
    m.def("cosine",
          [](const std::vector<double>& u, const std::vector<double>& v) {
              return similarity::cosine(to_vector(u), to_vector(v));
          },
          py::arg("u"), py::arg("v"));
    m.def("align_lcs",
          [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
              return similarity::align_lcs(to_tokens(a), to_tokens(b)).pairs;
          },
          py::arg("a"), py::arg("b"), "LCS alignment path over token lists.");
    m.def("overlap_ratio",
          [](const std::vector<std::string>& a, const std::vector<std::string>& b,
             bool use_max_bound) {
              return similarity::overlap_ratio(to_tokens(a), to_tokens(b), {use_max_bound});
          },
          py::arg("a"), py::arg("b"), py::arg("use_max_bound") = false);

    // corpus
    py::class_<corpus::QaTriple>(m, "QaTriple")
        .def(py::init([](const std::string& id, const std::string& question,
                         const std::string& context, const std::string& answer,
                         const std::string& retrieval_method, const std::string& split) {
                 corpus::QaTriple t;
                 t.id = id;
                 t.question = question;
                 t.context_raw = context;
                 t.context_sentences = textproc::split_sentences(context);
                 t.answer_raw = answer;
                 t.answer_sentences = textproc::split_sentences(answer);
                 t.retrieval_method = corpus::parse_retrieval_method(retrieval_method);
                 t.split = corpus::parse_split(split);
                 return t;
             }),
             py::arg("id"), py::arg("question"), py::arg("context"), py::arg("answer"),
             py::arg("retrieval_method") = "sparse", py::arg("split") = "test")
        .def_readonly("id", &corpus::QaTriple::id)
        .def_readonly("question", &corpus::QaTriple::question)
        .def_readonly("context", &corpus::QaTriple::context_raw)
        .def_readonly("context_sentences", &corpus::QaTriple::context_sentences)
        .def_readonly("answer", &corpus::QaTriple::answer_raw)
        .def_readonly("answer_sentences", &corpus::QaTriple::answer_sentences)
        .def_property_readonly("retrieval_method",
                               [](const corpus::QaTriple& t) {
                                   return corpus::to_string(t.retrieval_method);
                               })
        .def_property_readonly(
            "split", [](const corpus::QaTriple& t) { return corpus::to_string(t.split); })
        .def_property_readonly("label", [](const corpus::QaTriple& t) -> py::object {
            if (!t.gold_example_label) return py::none();
            return py::str(corpus::to_string(*t.gold_example_label));
        });

    m.def("load_dataset",
          [](const std::string& path, const std::string& adapter) {
              return corpus::load_dataset(path, adapter);
          },
          py::arg("path"), py::arg("adapter") = "canonical");
    m.def("split_counts", [](const std::vector<corpus::QaTriple>& dataset) {
        py::dict out;
        for (const auto& [split, counts] : corpus::split_counts(dataset)) {
            py::dict entry;
            entry["questions"] = counts.n_questions;
            entry["triples"] = counts.n_triples;
            entry["hallucinated"] = counts.n_hallucinated;
            entry["not_hallucinated"] = counts.n_not_hallucinated;
            out[py::str(corpus::to_string(split))] = entry;
        }
        return out;
    });
    m.def("method_stats", [](const std::vector<corpus::QaTriple>& dataset) {
        py::dict out;
        for (const auto& [method, stats] : corpus::method_stats(dataset)) {
            py::dict entry;
            entry["hallucinated_pct"] = stats.hallucinated_pct * 100.0;
            entry["examples"] = stats.n_examples;
            entry["mean_context_tokens"] = stats.mean_context_tokens;
            entry["sd_context_tokens"] = stats.sd_context_tokens;
            out[py::str(corpus::to_string(method))] = entry;
        }
        return out;
    });
    m.def("aggregate_sentence_votes",
          [](const std::vector<std::string>& votes) {
              std::vector<corpus::SentenceVerdict> verdicts;
              for (const auto& v : votes) verdicts.push_back(corpus::parse_sentence_verdict(v));
              auto [verdict, consensus] = corpus::aggregate_sentence_votes(verdicts);
              return py::make_tuple(corpus::to_string(verdict), consensus);
          },
          py::arg("votes"));
    m.def("derive_example_label",
          [](const std::vector<std::string>& labels, std::optional<bool> answerable,
             std::optional<bool> does_not_answer) {
              std::vector<corpus::SentenceVerdict> verdicts;
              for (const auto& v : labels) verdicts.push_back(corpus::parse_sentence_verdict(v));
              return corpus::to_string(
                  corpus::derive_example_label(verdicts, answerable, does_not_answer));
          },
          py::arg("sentence_labels"), py::arg("answerable") = py::none(),
          py::arg("does_not_answer") = py::none());

    // detectors
    py::class_<detectors::Thresholds>(m, "Thresholds")
        .def(py::init<double, double, double>(), py::arg("t1") = 0.6, py::arg("t2") = 0.1,
             py::arg("t3") = 0.2)
        .def_readwrite("t1", &detectors::Thresholds::t1_cosine)
        .def_readwrite("t2", &detectors::Thresholds::t2_overlap)
        .def_readwrite("t3", &detectors::Thresholds::t3_keyword);

    m.def("detect_similarity",
          [](const corpus::QaTriple& triple, const std::string& mode,
             const detectors::Thresholds& thresholds, size_t embedding_dim) {
              auto kind = evaluation::parse_detector_kind(mode);
              detectors::SimilarityMode similarity_mode;
              switch (kind) {
                  case evaluation::DetectorKind::Cosine:
                      similarity_mode = detectors::SimilarityMode::Cosine;
                      break;
                  case evaluation::DetectorKind::Overlap:
                      similarity_mode = detectors::SimilarityMode::Overlap;
                      break;
                  case evaluation::DetectorKind::Hybrid:
                      similarity_mode = detectors::SimilarityMode::Hybrid;
                      break;
                  default:
                      throw ValidationError("detect_similarity handles cosine/overlap/hybrid");
              }
              embedding::HashedEmbeddingProvider provider(embedding_dim);
              auto result =
                  detectors::detect_similarity(triple, similarity_mode, thresholds, &provider);
              return detection_dict(result);
          },
          py::arg("triple"), py::arg("mode") = "overlap",
          py::arg("thresholds") = detectors::Thresholds{}, py::arg("embedding_dim") = 384,
          "Similarity detection with the built-in deterministic embedding provider.");
    m.def("detect_keyword",
          [](const corpus::QaTriple& triple, const std::vector<std::string>& keywords,
             double t3) { return detection_dict(detectors::detect_keyword(triple, keywords, t3)); },
          py::arg("triple"), py::arg("keywords"), py::arg("t3") = 0.2);

    // evaluation
    m.def("classification_report",
          [](const std::vector<std::string>& predictions, const std::vector<std::string>& gold) {
              std::vector<corpus::ExampleLabel> p, g;
              for (const auto& s : predictions) p.push_back(corpus::parse_example_label(s));
              for (const auto& s : gold) g.push_back(corpus::parse_example_label(s));
              return eval_report_dict(evaluation::classification_report(p, g));
          },
          py::arg("predictions"), py::arg("gold"));
    m.def("krippendorff_alpha",
          [](const std::vector<std::vector<std::optional<std::string>>>& annotations) {
              return evaluation::krippendorff_alpha(annotations);
          },
          py::arg("annotations"), "Nominal-metric alpha; rows are annotators.");
    m.def("tune_thresholds",
          [](const std::string& mode, const std::vector<corpus::QaTriple>& dev_set,
             const std::vector<double>& grid, size_t embedding_dim) {
              auto kind = evaluation::parse_detector_kind(mode);
              embedding::HashedEmbeddingProvider provider(embedding_dim);
              auto result = evaluation::tune_thresholds(kind, dev_set, grid, &provider);
              py::list surface;
              for (const auto& point : result.surface) {
                  py::dict entry;
                  entry["t1"] = point.thresholds.t1_cosine;
                  entry["t2"] = point.thresholds.t2_overlap;
                  entry["t3"] = point.thresholds.t3_keyword;
                  entry["macro_f1"] = point.macro_f1;
                  surface.append(entry);
              }
              py::dict out;
              out["best_t1"] = result.best.t1_cosine;
              out["best_t2"] = result.best.t2_overlap;
              out["best_t3"] = result.best.t3_keyword;
              out["best_macro_f1"] = result.best_macro_f1;
              out["surface"] = surface;
              return out;
          },
          py::arg("mode"), py::arg("dev_set"), py::arg("grid"), py::arg("embedding_dim") = 384);

    // prompts and keywords
    m.def("build_answer_prompt",
          [](const std::string& method, const std::string& question, const std::string& context) {
              auto bundle = llm_gateway::build_answer_prompt(
                  corpus::parse_retrieval_method(method), question, context);
              return py::make_tuple(bundle.system_message, bundle.user_message);
          },
          py::arg("method"), py::arg("question"), py::arg("context"));
    m.def("build_keyword_prompt", [](const std::string& answer) {
        auto bundle = llm_gateway::build_keyword_prompt(answer);
        return py::make_tuple(bundle.system_message, bundle.user_message);
    });
    m.def("fallback_keywords", [](const std::string& answer) {
        auto result = llm_gateway::fallback_keywords(answer);
        return py::make_tuple(result.keywords, result.all_stopwords);
    });

    // retrieval
    py::class_<retrieval::MultiGranularityIndex>(m, "Index")
        .def_property_readonly("size",
                               [](const retrieval::MultiGranularityIndex& index) {
                                   return index.units().size();
                               })
        .def("save", [](const retrieval::MultiGranularityIndex& index,
                        const std::string& path) { index.save(path); })
        .def_static("load", [](const std::string& path) {
            return retrieval::MultiGranularityIndex::load(path);
        });

    m.def("ingest_manual",
          [](const std::string& path) {
              auto forest = retrieval::ingest_corpus(path);
              py::list out;
              for (const auto& doc : forest) {
                  py::dict entry;
                  entry["id"] = doc.id;
                  entry["sections"] = doc.children.size();
                  size_t paragraphs = 0;
                  for (const auto& s : doc.children) paragraphs += s.children.size();
                  entry["paragraphs"] = paragraphs;
                  out.append(entry);
              }
              return out;
          },
          py::arg("path"), "Summary of the parsed document tree.");
    m.def("build_index",
          [](const std::string& path, bool dense, size_t embedding_dim) {
              auto forest = retrieval::ingest_corpus(path);
              if (!dense) return retrieval::build_index(forest);
              embedding::HashedEmbeddingProvider provider(embedding_dim);
              return retrieval::build_index(forest, &provider);
          },
          py::arg("path"), py::arg("dense") = true, py::arg("embedding_dim") = 384);
    m.def("search",
          [](const retrieval::MultiGranularityIndex& index, const std::string& query,
             const std::string& mode, size_t k, size_t embedding_dim) {
              embedding::HashedEmbeddingProvider provider(embedding_dim);
              std::vector<retrieval::RetrievalHit> hits;
              if (mode == "sparse") {
                  hits = retrieval::search_sparse(index, query, k);
              } else if (mode == "dense") {
                  hits = retrieval::search_dense(index, query, k, provider);
              } else if (mode == "ensemble") {
                  hits = retrieval::search_ensemble(index, query, k, &provider).hits;
              } else if (mode == "adaptive") {
                  hits = retrieval::search_adaptive(index, query, k, &provider);
              } else {
                  throw ValidationError("unknown search mode: " + mode);
              }
              py::list out;
              for (const auto& hit : hits) {
                  py::dict entry;
                  entry["node_id"] = hit.node_id;
                  entry["level"] = retrieval::to_string(hit.level);
                  entry["score"] = hit.score;
                  entry["text"] = hit.text;
                  out.append(entry);
              }
              return out;
          },
          py::arg("index"), py::arg("query"), py::arg("mode") = "sparse", py::arg("k") = 3,
          py::arg("embedding_dim") = 384);
}
