#include "ragcheck/cli_app.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ragcheck/corpus.hpp"
#include "ragcheck/detectors.hpp"
#include "ragcheck/embedding.hpp"
#include "ragcheck/errors.hpp"
#include "ragcheck/evaluation.hpp"
#include "ragcheck/llm_gateway.hpp"
#include "ragcheck/manifest.hpp"
#include "ragcheck/retrieval.hpp"
#include "ragcheck/textproc.hpp"

namespace ragcheck::cli {
namespace {

using nlohmann::json;

struct RunConfig {
    std::string dataset_path;
    std::string adapter = "canonical";

    std::string detector_mode = "overlap";
    double t1 = 0.6;
    double t2 = 0.1;
    double t3 = 0.2;
    bool overlap_max_bound = false;

    std::string embedding_kind = "hashed"; // hashed | http | replay
    size_t embedding_dim = 384;
    std::string embedding_endpoint;
    std::string embedding_model;
    std::string embedding_cache;

    std::string chat_endpoint;
    std::string chat_model;
    std::string chat_credential_env;
    std::string chat_cache_dir;
    std::string chat_mode = "replay";
    double chat_temperature = -1.0; // < 0 means provider default

    size_t k = 3;
    double bm25_k1 = 0.9;
    double bm25_b = 0.4;
    bool bm25_stopwords = false;
    double descent_threshold = 0.5;
    double sibling_ratio = 0.5;
    double sparse_weight = 0.5;
    double dense_weight = 0.5;
    size_t over_retrieve = 5;

    std::string output_dir = "out";
    unsigned seed = 0; // reserved; the pipeline is deterministic

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ValidationError("cannot open config file: " + path);
        json doc;
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw ValidationError("config file is not valid JSON: " + std::string(e.what()));
        }
        auto get = [&](const char* section, const char* key, auto& target) {
            if (doc.contains(section) && doc[section].contains(key))
                target = doc[section][key].template get<std::decay_t<decltype(target)>>();
        };
        get("dataset", "path", dataset_path);
        get("dataset", "adapter", adapter);
        get("detector", "mode", detector_mode);
        get("detector", "t1", t1);
        get("detector", "t2", t2);
        get("detector", "t3", t3);
        get("detector", "overlap_max_bound", overlap_max_bound);
        get("embedding", "kind", embedding_kind);
        get("embedding", "dim", embedding_dim);
        get("embedding", "endpoint", embedding_endpoint);
        get("embedding", "model", embedding_model);
        get("embedding", "cache", embedding_cache);
        get("chat", "endpoint", chat_endpoint);
        get("chat", "model", chat_model);
        get("chat", "credential_env", chat_credential_env);
        get("chat", "cache_dir", chat_cache_dir);
        get("chat", "mode", chat_mode);
        get("chat", "temperature", chat_temperature);
        get("retrieval", "k", k);
        get("retrieval", "bm25_k1", bm25_k1);
        get("retrieval", "bm25_b", bm25_b);
        get("retrieval", "bm25_stopwords", bm25_stopwords);
        get("retrieval", "descent_threshold", descent_threshold);
        get("retrieval", "sibling_ratio", sibling_ratio);
        get("retrieval", "sparse_weight", sparse_weight);
        get("retrieval", "dense_weight", dense_weight);
        get("retrieval", "over_retrieve", over_retrieve);
        if (doc.contains("output_dir")) output_dir = doc["output_dir"].get<std::string>();
        if (doc.contains("seed")) seed = doc["seed"].get<unsigned>();
    }

    json snapshot() const {
        return json{
            {"dataset", {{"path", dataset_path}, {"adapter", adapter}}},
            {"detector",
             {{"mode", detector_mode},
              {"t1", t1},
              {"t2", t2},
              {"t3", t3},
              {"overlap_max_bound", overlap_max_bound}}},
            {"embedding",
             {{"kind", embedding_kind},
              {"dim", embedding_dim},
              {"endpoint", embedding_endpoint},
              {"model", embedding_model},
              {"cache", embedding_cache}}},
            {"chat",
             {{"endpoint", chat_endpoint},
              {"model", chat_model},
              {"credential_env", chat_credential_env},
              {"cache_dir", chat_cache_dir},
              {"mode", chat_mode},
              {"temperature", chat_temperature}}},
            {"retrieval",
             {{"k", k},
              {"bm25_k1", bm25_k1},
              {"bm25_b", bm25_b},
              {"bm25_stopwords", bm25_stopwords},
              {"descent_threshold", descent_threshold},
              {"sibling_ratio", sibling_ratio},
              {"sparse_weight", sparse_weight},
              {"dense_weight", dense_weight},
              {"over_retrieve", over_retrieve}}},
            {"output_dir", output_dir},
            {"seed", seed}};
    }

    void validate() const {
        for (double t : {t1, t2, t3})
            if (t < 0.0 || t > 1.0)
                throw ValidationError("thresholds must lie in [0, 1]");
        if (k < 1) throw ValidationError("k must be >= 1");
    }

    std::shared_ptr<embedding::EmbeddingProvider> make_provider() const {
        if (embedding_kind == "hashed") {
            auto inner = std::make_shared<embedding::HashedEmbeddingProvider>(embedding_dim);
            if (embedding_cache.empty()) return inner;
            return std::make_shared<embedding::CachingEmbeddingProvider>(inner, embedding_cache);
        }
        if (embedding_kind == "http") {
            if (embedding_endpoint.empty())
                throw ValidationError("embedding.kind=http requires embedding.endpoint");
            auto inner = std::make_shared<embedding::HttpEmbeddingProvider>(embedding_endpoint,
                                                                            embedding_model);
            if (embedding_cache.empty()) return inner;
            return std::make_shared<embedding::CachingEmbeddingProvider>(inner, embedding_cache);
        }
        if (embedding_kind == "replay") {
            if (embedding_cache.empty())
                throw ValidationError("embedding.kind=replay requires embedding.cache");
            return std::make_shared<embedding::ReplayEmbeddingProvider>(embedding_cache);
        }
        throw ValidationError("unknown embedding.kind: \"" + embedding_kind + "\"");
    }

    llm_gateway::ChatConfig chat_config() const {
        llm_gateway::ChatConfig cfg;
        cfg.endpoint = chat_endpoint;
        cfg.model = chat_model;
        cfg.credential_env = chat_credential_env;
        cfg.cache_dir = chat_cache_dir;
        cfg.mode = llm_gateway::parse_chat_mode(chat_mode);
        if (chat_temperature >= 0.0) cfg.temperature = chat_temperature;
        return cfg;
    }
};

std::vector<corpus::QaTriple> load_filtered(const RunConfig& config,
                                            const std::optional<std::string>& split_name) {
    if (config.dataset_path.empty())
        throw ValidationError("no dataset given (flag --dataset or config dataset.path)");
    auto dataset = corpus::load_dataset(config.dataset_path, config.adapter);
    if (split_name) {
        corpus::Split wanted = corpus::parse_split(*split_name);
        std::erase_if(dataset,
                      [&](const corpus::QaTriple& t) { return t.split != wanted; });
    }
    return dataset;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw OperationError("cannot write " + path.string());
    out << content;
}

std::string format_pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", fraction * 100.0);
    return buf;
}

json eval_report_json(const evaluation::EvalReport& report) {
    const auto& hal = report.per_class.at(corpus::ExampleLabel::Hallucinated);
    const auto& not_hal = report.per_class.at(corpus::ExampleLabel::NotHallucinated);
    auto cls = [](const evaluation::ClassMetrics& m) {
        return json{{"precision", m.precision},
                    {"recall", m.recall},
                    {"f1", m.f1},
                    {"degenerate", m.degenerate}};
    };
    return json{{"n", report.n},
                {"per_class", {{"hallucinated", cls(hal)}, {"not_hallucinated", cls(not_hal)}}},
                {"macro_f1", report.macro_f1},
                {"confusion",
                 {{"tp", report.tp}, {"fn", report.fn}, {"fp", report.fp}, {"tn", report.tn}}}};
}

void print_eval_report(std::ostream& os, const evaluation::EvalReport& report) {
    const auto& hal = report.per_class.at(corpus::ExampleLabel::Hallucinated);
    const auto& not_hal = report.per_class.at(corpus::ExampleLabel::NotHallucinated);
    os << "class             precision  recall     f1\n";
    os << "hallucinated      " << format_pct(hal.precision) << "      " << format_pct(hal.recall)
       << "      " << format_pct(hal.f1) << "\n";
    os << "not_hallucinated  " << format_pct(not_hal.precision) << "      "
       << format_pct(not_hal.recall) << "      " << format_pct(not_hal.f1) << "\n";
    os << "macro F1          " << format_pct(report.macro_f1) << "  (n=" << report.n << ")\n";
}

json hit_to_json(const retrieval::RetrievalHit& hit) {
    return json{{"node_id", hit.node_id},
                {"level", retrieval::to_string(hit.level)},
                {"score", hit.score},
                {"text", hit.text}};
}

json doc_node_to_json(const retrieval::DocNode& node) {
    json children = json::array();
    for (const auto& child : node.children) children.push_back(doc_node_to_json(child));
    json out = {{"id", node.id},
                {"level", retrieval::to_string(node.level)},
                {"text", node.text},
                {"children", std::move(children)}};
    if (node.title) out["title"] = *node.title;
    return out;
}

retrieval::DocNode doc_node_from_json(const json& doc) {
    retrieval::DocNode node;
    node.id = doc.at("id").get<std::string>();
    node.level = retrieval::parse_level(doc.at("level").get<std::string>());
    node.text = doc.at("text").get<std::string>();
    if (doc.contains("title") && doc["title"].is_string())
        node.title = doc["title"].get<std::string>();
    if (doc.contains("children"))
        for (const auto& child : doc["children"]) node.children.push_back(doc_node_from_json(child));
    return node;
}

// Loads documents for `index`: either an ingest output ({"documents":
// [{..."level"...}]}) or a raw manual (pre-chunked JSON or HTML).
std::vector<retrieval::DocNode> load_documents(const std::filesystem::path& source) {
    std::ifstream in(source, std::ios::binary);
    if (!in) throw ValidationError("cannot open source: " + source.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto first = content.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw ValidationError("empty source file: " + source.string());
    if (content[first] == '{' || content[first] == '[') {
        json doc = json::parse(content, nullptr, /*allow_exceptions=*/false);
        if (!doc.is_discarded() && doc.contains("documents") && doc["documents"].is_array() &&
            !doc["documents"].empty() && doc["documents"][0].contains("level")) {
            std::vector<retrieval::DocNode> forest;
            for (const auto& entry : doc["documents"]) forest.push_back(doc_node_from_json(entry));
            return forest;
        }
    }
    return retrieval::ingest_corpus(source);
}

// --- subcommand bodies ----------------------------------------------------

int cmd_stats(const RunConfig& config, const std::vector<std::string>& argv) {
    auto dataset = load_filtered(config, std::nullopt);
    auto stats_bundle = corpus::dataset_stats(dataset);
    const auto& splits = stats_bundle.per_split;
    const auto& methods = stats_bundle.per_method;

    json out;
    size_t total_triples = 0, total_hal = 0, total_not = 0, total_questions = 0;
    for (const auto& [split, counts] : splits) {
        out["splits"][corpus::to_string(split)] = {
            {"questions", counts.n_questions},
            {"triples", counts.n_triples},
            {"hallucinated", counts.n_hallucinated},
            {"not_hallucinated", counts.n_not_hallucinated}};
        total_triples += counts.n_triples;
        total_hal += counts.n_hallucinated;
        total_not += counts.n_not_hallucinated;
        total_questions += counts.n_questions;
    }
    out["totals"] = {{"questions", total_questions},
                     {"triples", total_triples},
                     {"hallucinated", total_hal},
                     {"not_hallucinated", total_not}};
    for (const auto& [method, stats] : methods) {
        out["methods"][corpus::to_string(method)] = {
            {"hallucinated_pct", stats.hallucinated_pct * 100.0},
            {"examples", stats.n_examples},
            {"mean_context_tokens", stats.mean_context_tokens},
            {"sd_context_tokens", stats.sd_context_tokens}};
    }

    std::filesystem::path dir(config.output_dir);
    write_text(dir / "stats.json", out.dump(2) + "\n");
    manifest::write_run_manifest(dir, argv, config.snapshot(), {config.dataset_path});

    std::cout << "split  questions  triples  hallucinated  not_hallucinated\n";
    for (const auto& [split, counts] : splits)
        std::cout << corpus::to_string(split) << "  " << counts.n_questions << "  "
                  << counts.n_triples << "  " << counts.n_hallucinated << "  "
                  << counts.n_not_hallucinated << "\n";
    std::cout << "total  " << total_questions << "  " << total_triples << "  " << total_hal
              << "  " << total_not << "\n\n";
    std::cout << "method  hallucinated%  examples  mean_tokens  sd_tokens\n";
    for (const auto& [method, stats] : methods)
        std::cout << corpus::to_string(method) << "  "
                  << format_pct(stats.hallucinated_pct) << "  " << stats.n_examples << "  "
                  << stats.mean_context_tokens << "  " << stats.sd_context_tokens << "\n";
    return 0;
}

int cmd_detect(const RunConfig& config, const std::optional<std::string>& split,
               const std::string& keyword_source, const std::vector<std::string>& argv) {
    auto dataset = load_filtered(config, split);
    if (dataset.empty()) throw ValidationError("no triples to detect on (check --split)");
    auto kind = evaluation::parse_detector_kind(config.detector_mode);
    detectors::Thresholds thresholds{config.t1, config.t2, config.t3};
    similarity::OverlapOptions overlap_options{config.overlap_max_bound};

    std::shared_ptr<embedding::EmbeddingProvider> provider;
    if (kind == evaluation::DetectorKind::Cosine || kind == evaluation::DetectorKind::Hybrid)
        provider = config.make_provider();

    std::unique_ptr<llm_gateway::ChatClient> chat;
    if (kind == evaluation::DetectorKind::Keyword && keyword_source == "llm")
        chat = std::make_unique<llm_gateway::ChatClient>(config.chat_config());

    std::sort(dataset.begin(), dataset.end(),
              [](const corpus::QaTriple& a, const corpus::QaTriple& b) { return a.id < b.id; });

    std::ostringstream lines;
    for (const auto& triple : dataset) {
        detectors::DetectionResult result;
        if (kind == evaluation::DetectorKind::Keyword) {
            std::vector<std::string> keywords;
            if (chat) {
                auto bundle = llm_gateway::build_keyword_prompt(triple.answer_raw);
                keywords = llm_gateway::parse_keyword_response(chat->chat(bundle));
            } else {
                keywords = llm_gateway::fallback_keywords(triple.answer_raw).keywords;
            }
            if (keywords.empty()) {
                // Nothing extractable: nothing can be flagged as missing.
                result.example_label = corpus::ExampleLabel::NotHallucinated;
                result.per_sentence_evidence.assign(triple.answer_sentences.size(), {});
            } else {
                result = detectors::detect_keyword(triple, keywords, thresholds.t3_keyword);
            }
        } else {
            auto mode = kind == evaluation::DetectorKind::Cosine ? detectors::SimilarityMode::Cosine
                        : kind == evaluation::DetectorKind::Overlap
                            ? detectors::SimilarityMode::Overlap
                            : detectors::SimilarityMode::Hybrid;
            result = detectors::detect_similarity(triple, mode, thresholds, provider.get(),
                                                  overlap_options);
        }

        json evidence = json::array();
        for (size_t i = 0; i < result.per_sentence_evidence.size(); ++i) {
            const auto& e = result.per_sentence_evidence[i];
            json entry = {{"sentence", i}, {"best_context", e.best_context_index}};
            entry["cosine"] = e.cosine ? json(*e.cosine) : json(nullptr);
            entry["overlap"] = e.overlap ? json(*e.overlap) : json(nullptr);
            evidence.push_back(std::move(entry));
        }
        json record = {{"triple_id", triple.id},
                       {"predicted_label", corpus::to_string(result.example_label)},
                       {"unsupported_indices", result.unsupported_sentence_indices},
                       {"evidence", std::move(evidence)}};
        lines << record.dump() << "\n";
    }

    std::filesystem::path dir(config.output_dir);
    write_text(dir / "detections.jsonl", lines.str());
    json meta = {{"mode", config.detector_mode},
                 {"split", split ? json(*split) : json(nullptr)},
                 {"thresholds", {{"t1", config.t1}, {"t2", config.t2}, {"t3", config.t3}}}};
    write_text(dir / "detections.meta.json", meta.dump(2) + "\n");
    manifest::write_run_manifest(dir, argv, config.snapshot(), {config.dataset_path});
    std::cout << "wrote " << (dir / "detections.jsonl").string() << " (" << dataset.size()
              << " triples)\n";
    return 0;
}

int cmd_eval(const RunConfig& config, const std::string& detections_path,
             const std::optional<std::string>& split, const std::string& label,
             const std::vector<std::string>& argv) {
    auto dataset = load_filtered(config, split);
    std::map<std::string, corpus::ExampleLabel> gold;
    for (const auto& triple : dataset) {
        if (!triple.gold_example_label)
            throw ValidationError("triple " + triple.id + " has no gold label");
        gold[triple.id] = *triple.gold_example_label;
    }

    std::ifstream in(detections_path);
    if (!in) throw ValidationError("cannot open detections: " + detections_path);
    std::vector<corpus::ExampleLabel> predictions, reference;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw ValidationError(detections_path + ":" + std::to_string(line_no) + ": " +
                                  e.what());
        }
        std::string id = record.at("triple_id").get<std::string>();
        auto it = gold.find(id);
        if (it == gold.end()) continue; // outside the evaluated split
        predictions.push_back(
            corpus::parse_example_label(record.at("predicted_label").get<std::string>()));
        reference.push_back(it->second);
    }
    if (predictions.empty())
        throw ValidationError("no detections matched the dataset (wrong split or ids?)");

    auto report = evaluation::classification_report(predictions, reference);
    json out = eval_report_json(report);
    out["label"] = label;
    // Carry the detect-run metadata through when present.
    std::filesystem::path meta_file =
        std::filesystem::path(detections_path).parent_path() / "detections.meta.json";
    if (std::filesystem::exists(meta_file)) {
        std::ifstream meta_in(meta_file);
        json meta;
        meta_in >> meta;
        out["mode"] = meta.value("mode", "");
        if (meta.contains("split") && !meta["split"].is_null()) out["split"] = meta["split"];
    }
    if (split) out["split"] = *split;

    std::filesystem::path dir(config.output_dir);
    write_text(dir / "eval.json", out.dump(2) + "\n");
    manifest::write_run_manifest(dir, argv, config.snapshot(),
                                 {config.dataset_path, detections_path});
    print_eval_report(std::cout, report);
    return 0;
}

int cmd_tune(const RunConfig& config, const std::optional<std::string>& split,
             const std::vector<double>& grid, const std::vector<std::string>& argv) {
    auto dataset = load_filtered(config, split.has_value() ? split : std::optional<std::string>("dev"));
    if (dataset.empty()) throw ValidationError("no triples in the tuning split");
    auto kind = evaluation::parse_detector_kind(config.detector_mode);

    std::shared_ptr<embedding::EmbeddingProvider> provider;
    if (kind == evaluation::DetectorKind::Cosine || kind == evaluation::DetectorKind::Hybrid)
        provider = config.make_provider();

    similarity::OverlapOptions overlap_options{config.overlap_max_bound};
    auto result = evaluation::tune_thresholds(kind, dataset, grid, provider.get(), {},
                                              overlap_options);

    json surface = json::array();
    for (const auto& point : result.surface) {
        json entry = {{"macro_f1", point.macro_f1}};
        if (kind == evaluation::DetectorKind::Cosine || kind == evaluation::DetectorKind::Hybrid)
            entry["t1"] = point.thresholds.t1_cosine;
        if (kind == evaluation::DetectorKind::Overlap || kind == evaluation::DetectorKind::Hybrid)
            entry["t2"] = point.thresholds.t2_overlap;
        if (kind == evaluation::DetectorKind::Keyword)
            entry["t3"] = point.thresholds.t3_keyword;
        surface.push_back(std::move(entry));
    }
    json best = {{"t1", result.best.t1_cosine},
                 {"t2", result.best.t2_overlap},
                 {"t3", result.best.t3_keyword},
                 {"macro_f1", result.best_macro_f1}};
    json out = {{"mode", config.detector_mode},
                {"grid", grid},
                {"surface", std::move(surface)},
                {"best", std::move(best)}};

    std::filesystem::path dir(config.output_dir);
    write_text(dir / "tune.json", out.dump(2) + "\n");
    manifest::write_run_manifest(dir, argv, config.snapshot(), {config.dataset_path});
    std::cout << "best macro F1 " << format_pct(result.best_macro_f1) << " at t1="
              << result.best.t1_cosine << " t2=" << result.best.t2_overlap
              << " t3=" << result.best.t3_keyword << "\n";
    return 0;
}

std::vector<corpus::SentenceVerdict> read_label_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open label file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    if (!doc.is_array()) throw ValidationError(path + ": expected a JSON array of labels");
    std::vector<corpus::SentenceVerdict> labels;
    for (const auto& entry : doc)
        labels.push_back(corpus::parse_sentence_verdict(entry.get<std::string>()));
    return labels;
}

int cmd_agreement(const RunConfig& config, const std::string& reference_path,
                  const std::string& candidate_path, const std::string& annotations_path,
                  const std::vector<std::string>& argv) {
    json out;
    std::vector<std::filesystem::path> inputs;
    if (!annotations_path.empty()) {
        std::ifstream in(annotations_path);
        if (!in) throw ValidationError("cannot open annotations: " + annotations_path);
        json doc;
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw ValidationError(annotations_path + ": " + e.what());
        }
        const json& rows = doc.is_object() && doc.contains("annotations") ? doc["annotations"] : doc;
        if (!rows.is_array()) throw ValidationError("annotations must be an array of rows");
        std::vector<std::vector<std::optional<std::string>>> matrix;
        for (const auto& row : rows) {
            std::vector<std::optional<std::string>> cells;
            for (const auto& cell : row)
                cells.push_back(cell.is_null() ? std::nullopt
                                               : std::optional<std::string>(cell.get<std::string>()));
            matrix.push_back(std::move(cells));
        }
        double alpha = evaluation::krippendorff_alpha(matrix);
        out["krippendorff_alpha"] = alpha;
        inputs.emplace_back(annotations_path);
        std::cout << "Krippendorff alpha: " << alpha << "\n";
    }
    if (!reference_path.empty() || !candidate_path.empty()) {
        if (reference_path.empty() || candidate_path.empty())
            throw ValidationError("--reference and --candidate must be given together");
        auto reference = read_label_file(reference_path);
        auto candidate = read_label_file(candidate_path);
        auto report = evaluation::agreement_report(reference, candidate);
        std::cout << "label       precision  recall     f1\n";
        for (const auto& [label, entry] : report.per_label) {
            std::string name = corpus::to_string(label);
            if (!entry.present) {
                out["per_label"][name] = {{"present", false}};
                continue;
            }
            out["per_label"][name] = {{"present", true},
                                      {"precision", entry.metrics.precision},
                                      {"recall", entry.metrics.recall},
                                      {"f1", entry.metrics.f1}};
            std::cout << name << "  " << format_pct(entry.metrics.precision) << "      "
                      << format_pct(entry.metrics.recall) << "      "
                      << format_pct(entry.metrics.f1) << "\n";
        }
        inputs.emplace_back(reference_path);
        inputs.emplace_back(candidate_path);
    }
    if (out.empty())
        throw ValidationError("agreement needs --annotations or --reference/--candidate");

    std::filesystem::path dir(config.output_dir);
    write_text(dir / "agreement.json", out.dump(2) + "\n");
    manifest::write_run_manifest(dir, argv, config.snapshot(), inputs);
    return 0;
}

int cmd_extract_keywords(const RunConfig& config, const std::string& answer,
                         const std::string& input_path, const std::string& source,
                         const std::vector<std::string>& argv) {
    std::unique_ptr<llm_gateway::ChatClient> chat;
    if (source == "llm") chat = std::make_unique<llm_gateway::ChatClient>(config.chat_config());
    else if (source != "fallback")
        throw ValidationError("--source must be fallback or llm");

    auto extract = [&](const std::string& text) -> std::pair<std::vector<std::string>, bool> {
        if (chat) {
            auto bundle = llm_gateway::build_keyword_prompt(text);
            return {llm_gateway::parse_keyword_response(chat->chat(bundle)), false};
        }
        auto result = llm_gateway::fallback_keywords(text);
        return {result.keywords, result.all_stopwords};
    };

    if (!answer.empty()) {
        auto [keywords, all_stopwords] = extract(answer);
        json out = {{"keywords", keywords}, {"all_stopwords", all_stopwords}};
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    if (input_path.empty()) throw ValidationError("extract-keywords needs --answer or --input");

    std::ifstream in(input_path);
    if (!in) throw ValidationError("cannot open input: " + input_path);
    std::ostringstream lines;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw ValidationError(input_path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        auto [keywords, all_stopwords] = extract(record.at("answer").get<std::string>());
        json out = {{"id", record.value("id", "line-" + std::to_string(line_no))},
                    {"keywords", keywords},
                    {"all_stopwords", all_stopwords}};
        lines << out.dump() << "\n";
    }
    std::filesystem::path dir(config.output_dir);
    write_text(dir / "keywords.jsonl", lines.str());
    manifest::write_run_manifest(dir, argv, config.snapshot(), {input_path});
    std::cout << "wrote " << (dir / "keywords.jsonl").string() << "\n";
    return 0;
}

int cmd_ingest(const RunConfig& config, const std::string& source,
               const std::vector<std::string>& argv) {
    auto forest = retrieval::ingest_corpus(source);
    json docs = json::array();
    size_t sections = 0, paragraphs = 0;
    for (const auto& doc : forest) {
        docs.push_back(doc_node_to_json(doc));
        sections += doc.children.size();
        for (const auto& s : doc.children) paragraphs += s.children.size();
    }
    json out = {{"documents", std::move(docs)}};
    std::filesystem::path dir(config.output_dir);
    write_text(dir / "tree.json", out.dump(2) + "\n");
    manifest::write_run_manifest(dir, argv, config.snapshot(), {source});
    std::cout << forest.size() << " documents, " << sections << " sections, " << paragraphs
              << " paragraphs -> " << (dir / "tree.json").string() << "\n";
    return 0;
}

int cmd_index(const RunConfig& config, const std::string& source, bool dense,
              const std::vector<std::string>& argv) {
    auto forest = load_documents(source);
    retrieval::Bm25Params bm25{config.bm25_k1, config.bm25_b, config.bm25_stopwords};
    std::shared_ptr<embedding::EmbeddingProvider> provider;
    if (dense) provider = config.make_provider();
    auto index = retrieval::build_index(forest, provider.get(), bm25);

    std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    index.save(dir / "index.json");
    manifest::write_run_manifest(dir, argv, config.snapshot(), {source});
    std::cout << index.units().size() << " units indexed"
              << (index.has_dense() ? " (dense enabled)" : "") << " -> "
              << (dir / "index.json").string() << "\n";
    return 0;
}

int cmd_search(const RunConfig& config, const std::string& index_path, const std::string& query,
               const std::string& mode, const std::string& level_name, bool write_output,
               const std::vector<std::string>& argv) {
    auto index = retrieval::MultiGranularityIndex::load(index_path);
    std::optional<retrieval::Level> level;
    if (!level_name.empty()) level = retrieval::parse_level(level_name);
    retrieval::Bm25Params bm25{config.bm25_k1, config.bm25_b, config.bm25_stopwords};
    retrieval::EnsembleParams ensemble{config.sparse_weight, config.dense_weight,
                                       config.over_retrieve};

    std::shared_ptr<embedding::EmbeddingProvider> provider;
    std::vector<retrieval::RetrievalHit> hits;
    bool dense_unavailable = false;
    if (mode == "sparse") {
        hits = retrieval::search_sparse(index, query, config.k, level, bm25);
    } else if (mode == "dense") {
        provider = config.make_provider();
        hits = retrieval::search_dense(index, query, config.k, *provider, level);
    } else if (mode == "ensemble") {
        provider = config.make_provider();
        auto outcome =
            retrieval::search_ensemble(index, query, config.k, provider.get(), bm25, ensemble, level);
        hits = std::move(outcome.hits);
        dense_unavailable = outcome.dense_unavailable;
    } else if (mode == "adaptive") {
        provider = config.make_provider();
        retrieval::AdaptiveParams adaptive{config.descent_threshold, config.sibling_ratio};
        hits = retrieval::search_adaptive(index, query, config.k, provider.get(), adaptive, bm25,
                                          ensemble);
    } else {
        throw ValidationError("unknown search mode: \"" + mode + "\"");
    }

    if (dense_unavailable)
        std::cerr << "warning: dense vectors unavailable, fell back to sparse-only\n";
    std::ostringstream lines;
    for (const auto& hit : hits) lines << hit_to_json(hit).dump() << "\n";
    std::cout << lines.str();
    if (write_output) {
        std::filesystem::path dir(config.output_dir);
        write_text(dir / "hits.jsonl", lines.str());
        manifest::write_run_manifest(dir, argv, config.snapshot(), {index_path});
    }
    return 0;
}

int cmd_report(const RunConfig& config, const std::vector<std::string>& eval_paths,
               const std::vector<std::string>& argv) {
    if (eval_paths.empty()) throw ValidationError("report needs at least one --eval file");
    struct Cell {
        double hal_f1 = 0, not_hal_f1 = 0, macro = 0;
        bool present = false;
    };
    std::map<std::string, std::map<std::string, Cell>> table; // mode -> split -> cell
    json collected = json::array();
    for (const auto& path : eval_paths) {
        std::ifstream in(path);
        if (!in) throw ValidationError("cannot open eval report: " + path);
        json doc;
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw ValidationError(path + ": " + e.what());
        }
        collected.push_back(doc);
        std::string mode = doc.value("mode", doc.value("label", path));
        std::string split = doc.value("split", "all");
        Cell cell;
        cell.hal_f1 = doc["per_class"]["hallucinated"]["f1"].get<double>();
        cell.not_hal_f1 = doc["per_class"]["not_hallucinated"]["f1"].get<double>();
        cell.macro = doc["macro_f1"].get<double>();
        cell.present = true;
        table[mode][split] = cell;
    }

    const std::vector<std::string> split_order = {"train", "dev", "test", "all"};
    std::ostringstream text;
    text << "method";
    for (const auto& split : split_order) text << "\t" << split << ":Hal\t" << split << ":N-Hal\t"
                                               << split << ":Overall";
    text << "\n";
    for (const auto& [mode, row] : table) {
        text << mode;
        for (const auto& split : split_order) {
            auto it = row.find(split);
            if (it == row.end() || !it->second.present) {
                text << "\t-\t-\t-";
            } else {
                text << "\t" << format_pct(it->second.hal_f1) << "\t"
                     << format_pct(it->second.not_hal_f1) << "\t"
                     << format_pct(it->second.macro);
            }
        }
        text << "\n";
    }

    std::filesystem::path dir(config.output_dir);
    write_text(dir / "report.txt", text.str());
    write_text(dir / "report.json", collected.dump(2) + "\n");
    std::vector<std::filesystem::path> inputs(eval_paths.begin(), eval_paths.end());
    manifest::write_run_manifest(dir, argv, config.snapshot(), inputs);
    std::cout << text.str();
    return 0;
}

} // namespace

int run_command(const std::vector<std::string>& argv) {
    CLI::App app{"hallucination detection and retrieval toolkit for grounded QA"};
    app.set_version_flag("--version", RAGCHECK_VERSION);
    app.require_subcommand(1);

    RunConfig config;
    // --config is applied before the other flags so explicit flags win.
    for (size_t i = 1; i < argv.size(); ++i) {
        if (argv[i] == "--config" && i + 1 < argv.size()) {
            config.load_file(argv[i + 1]);
            break;
        }
    }
    std::string config_path_sink;
    app.add_option("--config", config_path_sink, "JSON config file (flags override it)");

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path_sink,
                        "JSON config file (flags override it)");
        cmd->add_option("--dataset", config.dataset_path, "line-delimited dataset file");
        cmd->add_option("--adapter", config.adapter, "dataset schema adapter")
            ->check(CLI::IsMember(corpus::adapter_ids()));
        cmd->add_option("--out", config.output_dir, "output directory");
        cmd->add_option("--embedding-kind", config.embedding_kind,
                        "embedding provider: hashed|http|replay");
        cmd->add_option("--embedding-dim", config.embedding_dim, "hashed provider dimension");
        cmd->add_option("--embedding-endpoint", config.embedding_endpoint);
        cmd->add_option("--embedding-cache", config.embedding_cache);
    };

    auto* stats = app.add_subcommand("stats", "dataset accounting per split and method");
    add_common(stats);

    auto* detect = app.add_subcommand("detect", "run a hallucination detector over a dataset");
    add_common(detect);
    std::optional<std::string> detect_split;
    std::string keyword_source = "fallback";
    detect->add_option("--mode", config.detector_mode, "cosine|overlap|hybrid|keyword");
    detect->add_option("--t1", config.t1, "cosine threshold");
    detect->add_option("--t2", config.t2, "overlap threshold");
    detect->add_option("--t3", config.t3, "keyword threshold");
    detect->add_option("--split", detect_split, "restrict to one split");
    detect->add_option("--keyword-source", keyword_source, "fallback|llm");
    detect->add_flag("--overlap-max-bound", config.overlap_max_bound,
                     "use the max(4, 30%) phrase qualification bound");

    auto* eval = app.add_subcommand("eval", "score detections against gold labels");
    add_common(eval);
    std::string detections_path;
    std::optional<std::string> eval_split;
    std::string eval_label = "run";
    eval->add_option("--detections", detections_path, "detections.jsonl from detect")
        ->required();
    eval->add_option("--split", eval_split, "restrict to one split");
    eval->add_option("--label", eval_label, "label recorded in the report");

    auto* tune = app.add_subcommand("tune", "grid-search detector thresholds on a split");
    add_common(tune);
    std::optional<std::string> tune_split;
    std::vector<double> grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    tune->add_option("--mode", config.detector_mode, "cosine|overlap|hybrid|keyword");
    tune->add_option("--split", tune_split, "tuning split (default dev)");
    tune->add_option("--grid", grid, "threshold grid values");
    tune->add_flag("--overlap-max-bound", config.overlap_max_bound);

    auto* agreement = app.add_subcommand("agreement", "annotation agreement statistics");
    add_common(agreement);
    std::string reference_path, candidate_path, annotations_path;
    agreement->add_option("--reference", reference_path, "JSON array of reference labels");
    agreement->add_option("--candidate", candidate_path, "JSON array of candidate labels");
    agreement->add_option("--annotations", annotations_path,
                          "annotator-by-item matrix for Krippendorff alpha");

    auto* extract = app.add_subcommand("extract-keywords", "keyword extraction for answers");
    add_common(extract);
    std::string answer_text, extract_input, extract_source = "fallback";
    extract->add_option("--answer", answer_text, "a single answer paragraph");
    extract->add_option("--input", extract_input, "JSONL of {id, answer} records");
    extract->add_option("--source", extract_source, "fallback|llm");

    auto* ingest = app.add_subcommand("ingest", "parse a manual into a document tree");
    add_common(ingest);
    std::string ingest_source;
    ingest->add_option("--source", ingest_source, "manual file (pre-chunked JSON or HTML)")
        ->required();

    auto* index_cmd = app.add_subcommand("index", "build the multi-granularity index");
    add_common(index_cmd);
    std::string index_source;
    bool index_dense = false;
    index_cmd->add_option("--source", index_source, "ingest output or raw manual")->required();
    index_cmd->add_flag("--dense", index_dense, "embed every unit with the provider");

    auto* search = app.add_subcommand("search", "query a persisted index");
    add_common(search);
    std::string search_index, search_query, search_mode = "sparse", search_level;
    bool search_write = false;
    search->add_option("--index", search_index, "index.json from index")->required();
    search->add_option("--query", search_query, "query text")->required();
    search->add_option("--mode", search_mode, "sparse|dense|ensemble|adaptive");
    search->add_option("--level", search_level, "document|section|paragraph");
    search->add_option("--k", config.k, "number of hits");
    search->add_flag("--write", search_write, "also write hits.jsonl and a manifest");
    search->add_option("--theta", config.descent_threshold, "adaptive descent threshold");
    search->add_option("--rho", config.sibling_ratio, "adaptive sibling ratio");

    auto* report = app.add_subcommand("report", "combine eval reports into a results table");
    add_common(report);
    std::vector<std::string> eval_paths;
    report->add_option("--eval", eval_paths, "eval.json files to combine");

    try {
        std::vector<const char*> cargs;
        cargs.reserve(argv.size());
        for (const auto& arg : argv) cargs.push_back(arg.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        config.validate();
        if (stats->parsed()) return cmd_stats(config, argv);
        if (detect->parsed()) return cmd_detect(config, detect_split, keyword_source, argv);
        if (eval->parsed())
            return cmd_eval(config, detections_path, eval_split, eval_label, argv);
        if (tune->parsed()) return cmd_tune(config, tune_split, grid, argv);
        if (agreement->parsed())
            return cmd_agreement(config, reference_path, candidate_path, annotations_path, argv);
        if (extract->parsed())
            return cmd_extract_keywords(config, answer_text, extract_input, extract_source, argv);
        if (ingest->parsed()) return cmd_ingest(config, ingest_source, argv);
        if (index_cmd->parsed()) return cmd_index(config, index_source, index_dense, argv);
        if (search->parsed())
            return cmd_search(config, search_index, search_query, search_mode, search_level,
                              search_write, argv);
        if (report->parsed()) return cmd_report(config, eval_paths, argv);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const OperationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_command(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<size_t>(argc));
    for (int i = 0; i < argc; ++i) args.emplace_back(argv[i]);
    return run_command(args);
}

} // namespace ragcheck::cli
