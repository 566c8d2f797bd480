#include "ragcheck/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <unordered_map>

#include <json.hpp>

#include "ragcheck/errors.hpp"
#include "ragcheck/textproc.hpp"

namespace ragcheck::retrieval {
namespace {

std::string pad3(size_t n) {
    std::string s = std::to_string(n);
    return s.size() >= 3 ? s : std::string(3 - s.size(), '0') + s;
}

std::string join_lines(const std::vector<std::string>& parts) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back('\n');
        out += parts[i];
    }
    return out;
}

// --- minimal HTML subset -------------------------------------------------

std::string decode_entities(const std::string& text) {
    static const std::pair<const char*, char> kEntities[] = {
        {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&#39;", '\''}};
    std::string out;
    size_t i = 0;
    while (i < text.size()) {
        bool matched = false;
        if (text[i] == '&') {
            for (const auto& [entity, ch] : kEntities) {
                size_t len = std::strlen(entity);
                if (text.compare(i, len, entity) == 0) {
                    out.push_back(ch);
                    i += len;
                    matched = true;
                    break;
                }
            }
        }
        if (!matched) out.push_back(text[i++]);
    }
    return out;
}

struct HtmlBlock {
    int heading_rank = 0; // 0 = paragraph, 1..6 = <hN>
    std::string text;
};

std::vector<HtmlBlock> parse_html_blocks(const std::string& content) {
    std::vector<HtmlBlock> blocks;
    size_t i = 0;
    const size_t n = content.size();
    auto lowered = [&](size_t from, size_t len) {
        std::string s = content.substr(from, len);
        for (char& c : s)
            if (c >= 'A' && c <= 'Z') c = char(c - 'A' + 'a');
        return s;
    };
    while (i < n) {
        size_t open = content.find('<', i);
        if (open == std::string::npos) break;
        size_t close = content.find('>', open);
        if (close == std::string::npos) break;
        std::string tag = lowered(open + 1, close - open - 1);
        int rank = 0;
        bool is_para = false;
        if (tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6')
            rank = tag[1] - '0';
        else if (tag == "p" || tag.rfind("p ", 0) == 0)
            is_para = true;
        if (rank == 0 && !is_para) {
            i = close + 1;
            continue;
        }
        std::string close_tag = rank ? "</h" + std::string(1, tag[1]) + ">" : "</p>";
        size_t body_begin = close + 1;
        size_t body_end = content.find(close_tag, body_begin);
        if (body_end == std::string::npos) {
            // Also accept uppercase closers.
            std::string upper = close_tag;
            for (char& c : upper)
                if (c >= 'a' && c <= 'z') c = char(c - 'a' + 'A');
            body_end = content.find(upper, body_begin);
        }
        if (body_end == std::string::npos) break;
        std::string body = content.substr(body_begin, body_end - body_begin);
        // Strip nested tags.
        std::string stripped;
        bool in_tag = false;
        for (char c : body) {
            if (c == '<') in_tag = true;
            else if (c == '>') in_tag = false;
            else if (!in_tag) stripped.push_back(c);
        }
        std::string text = textproc::normalize_whitespace(decode_entities(stripped));
        if (!text.empty()) blocks.push_back({rank, text});
        i = body_end + close_tag.size();
    }
    return blocks;
}

DocNode from_html(const std::string& content, const std::string& fallback_id) {
    auto blocks = parse_html_blocks(content);
    if (blocks.empty()) throw ValidationError("no headings or paragraphs found in HTML source");

    DocNode doc;
    doc.id = fallback_id;
    doc.level = Level::Document;

    std::vector<std::vector<std::string>> section_paragraphs;
    std::vector<std::optional<std::string>> section_titles;
    bool doc_title_taken = false;
    for (const auto& block : blocks) {
        if (block.heading_rank == 1 && !doc_title_taken) {
            doc.title = block.text;
            doc_title_taken = true;
            continue;
        }
        if (block.heading_rank > 0) {
            section_titles.push_back(block.text);
            section_paragraphs.emplace_back();
            continue;
        }
        if (section_paragraphs.empty()) {
            section_titles.push_back(std::nullopt); // content before any heading
            section_paragraphs.emplace_back();
        }
        section_paragraphs.back().push_back(block.text);
    }

    for (size_t s = 0; s < section_paragraphs.size(); ++s) {
        DocNode section;
        section.id = doc.id + "/s" + pad3(s);
        section.level = Level::Section;
        section.title = section_titles[s];
        for (size_t p = 0; p < section_paragraphs[s].size(); ++p) {
            DocNode para;
            para.id = section.id + "/p" + pad3(p);
            para.level = Level::Paragraph;
            para.text = section_paragraphs[s][p];
            section.children.push_back(std::move(para));
        }
        doc.children.push_back(std::move(section));
    }
    // Drop sections that ended up empty (heading with no paragraphs).
    std::erase_if(doc.children, [](const DocNode& s) { return s.children.empty(); });
    if (doc.children.empty()) throw ValidationError("document has no paragraphs");
    for (auto& section : doc.children) {
        std::vector<std::string> texts;
        for (const auto& p : section.children) texts.push_back(p.text);
        section.text = join_lines(texts);
    }
    std::vector<std::string> texts;
    for (const auto& s : doc.children) texts.push_back(s.text);
    doc.text = join_lines(texts);
    return doc;
}

DocNode from_json(const nlohmann::json& doc_json, const std::string& fallback_id) {
    DocNode doc;
    doc.id = doc_json.value("id", fallback_id);
    doc.level = Level::Document;
    if (doc_json.contains("title") && doc_json["title"].is_string())
        doc.title = doc_json["title"].get<std::string>();
    if (!doc_json.contains("sections") || !doc_json["sections"].is_array() ||
        doc_json["sections"].empty())
        throw ValidationError("pre-chunked document needs a nonempty 'sections' list");
    size_t s_idx = 0;
    for (const auto& section_json : doc_json["sections"]) {
        DocNode section;
        section.id = doc.id + "/s" + pad3(s_idx++);
        section.level = Level::Section;
        if (section_json.contains("title") && section_json["title"].is_string())
            section.title = section_json["title"].get<std::string>();
        if (!section_json.contains("paragraphs") || !section_json["paragraphs"].is_array())
            throw ValidationError("section needs a 'paragraphs' list");
        size_t p_idx = 0;
        std::vector<std::string> texts;
        for (const auto& para_json : section_json["paragraphs"]) {
            DocNode para;
            para.id = section.id + "/p" + pad3(p_idx++);
            para.level = Level::Paragraph;
            para.text = para_json.get<std::string>();
            if (para.text.empty()) throw ValidationError("empty paragraph in " + section.id);
            texts.push_back(para.text);
            section.children.push_back(std::move(para));
        }
        if (section.children.empty())
            throw ValidationError("section " + section.id + " has no paragraphs");
        section.text = join_lines(texts);
        doc.children.push_back(std::move(section));
    }
    std::vector<std::string> texts;
    for (const auto& s : doc.children) texts.push_back(s.text);
    doc.text = join_lines(texts);
    return doc;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open source file: " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

bool looks_like_json(const std::string& content) {
    for (char c : content) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
        return c == '{' || c == '[';
    }
    return false;
}

// Shared min-max convention: a degenerate list maps to 1 when positive
// (everything is the max) and to 0 otherwise, so all-zero corpora stay zero.
double minmax(double x, double lo, double hi) {
    if (hi > lo) return (x - lo) / (hi - lo);
    return hi > 0.0 ? 1.0 : 0.0;
}

std::vector<std::string> query_terms(const std::string& query, const Bm25Params& params) {
    std::vector<std::string> terms;
    for (auto& token : textproc::tokenize(query).tokens) {
        if (params.filter_stopwords && textproc::is_stopword(token)) continue;
        terms.push_back(std::move(token));
    }
    return terms;
}

} // namespace

std::string to_string(Level level) {
    switch (level) {
        case Level::Document: return "document";
        case Level::Section: return "section";
        case Level::Paragraph: return "paragraph";
    }
    return "?";
}

Level parse_level(const std::string& text) {
    std::string lowered;
    for (char c : text) lowered.push_back(c >= 'A' && c <= 'Z' ? char(c - 'A' + 'a') : c);
    if (lowered == "document" || lowered == "doc") return Level::Document;
    if (lowered == "section" || lowered == "sec") return Level::Section;
    if (lowered == "paragraph" || lowered == "para") return Level::Paragraph;
    throw ValidationError("unknown level: \"" + text + "\"");
}

DocNode ingest_manual_text(const std::string& content, const std::string& format,
                           const std::string& fallback_id) {
    if (format == "json") {
        nlohmann::json doc_json;
        try {
            doc_json = nlohmann::json::parse(content);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("unparseable JSON manual: ") + e.what());
        }
        if (doc_json.contains("documents"))
            throw ValidationError("source holds multiple documents; use ingest_corpus");
        return from_json(doc_json, fallback_id);
    }
    if (format == "html") return from_html(content, fallback_id);
    throw ValidationError("unknown manual format: \"" + format + "\"");
}

DocNode ingest_manual(const std::filesystem::path& source) {
    std::string content = read_file(source);
    if (content.find_first_not_of(" \t\r\n") == std::string::npos)
        throw ValidationError("empty source file: " + source.string());
    std::string id = source.stem().string();
    return ingest_manual_text(content, looks_like_json(content) ? "json" : "html", id);
}

std::vector<DocNode> ingest_corpus(const std::filesystem::path& source) {
    std::string content = read_file(source);
    if (content.find_first_not_of(" \t\r\n") == std::string::npos)
        throw ValidationError("empty source file: " + source.string());
    if (looks_like_json(content)) {
        nlohmann::json doc_json;
        try {
            doc_json = nlohmann::json::parse(content);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("unparseable JSON corpus: ") + e.what());
        }
        if (doc_json.contains("documents")) {
            std::vector<DocNode> forest;
            size_t d = 0;
            for (const auto& entry : doc_json["documents"])
                forest.push_back(from_json(entry, "doc" + pad3(d++)));
            if (forest.empty()) throw ValidationError("'documents' list is empty");
            return forest;
        }
        return {from_json(doc_json, source.stem().string())};
    }
    return {from_html(content, source.stem().string())};
}

const std::vector<MultiGranularityIndex::Posting>& MultiGranularityIndex::postings(
    const std::string& term) const {
    static const std::vector<Posting> kEmpty;
    auto it = inverted_.find(term);
    return it == inverted_.end() ? kEmpty : it->second;
}

size_t MultiGranularityIndex::level_unit_count(Level level) const {
    size_t n = 0;
    for (const auto& u : units_)
        if (u.level == level) ++n;
    return n;
}

double MultiGranularityIndex::level_avg_tokens(Level level) const {
    size_t n = 0, total = 0;
    for (const auto& u : units_) {
        if (u.level == level) {
            ++n;
            total += u.token_count;
        }
    }
    return n ? double(total) / double(n) : 0.0;
}

size_t MultiGranularityIndex::level_document_frequency(const std::string& term,
                                                       Level level) const {
    size_t df = 0;
    for (const auto& posting : postings(term))
        if (units_[posting.unit].level == level) ++df;
    return df;
}

MultiGranularityIndex build_index(const std::vector<DocNode>& forest,
                                  embedding::EmbeddingProvider* provider,
                                  const Bm25Params& params) {
    if (forest.empty()) throw ValidationError("build_index: empty forest");
    MultiGranularityIndex index;
    index.stopwords_filtered_ = params.filter_stopwords;

    // Flatten in document pre-order, keeping tree links by unit index.
    std::function<void(const DocNode&, int, int)> walk = [&](const DocNode& node, int parent,
                                                             int document) {
        MultiGranularityIndex::Unit unit;
        unit.node_id = node.id;
        unit.level = node.level;
        unit.text = node.text;
        unit.parent = parent;
        int self = static_cast<int>(index.units_.size());
        unit.document = document < 0 ? self : document;
        index.units_.push_back(std::move(unit));
        if (parent >= 0) index.units_[parent].children.push_back(self);
        else index.roots_.push_back(self);
        for (const auto& child : node.children) walk(child, self, index.units_[self].document);
    };
    for (const auto& root : forest) walk(root, -1, -1);

    // Inverted postings and token counts.
    for (size_t u = 0; u < index.units_.size(); ++u) {
        std::unordered_map<std::string, size_t> counts;
        auto tokens = textproc::tokenize(index.units_[u].text).tokens;
        size_t kept = 0;
        for (auto& token : tokens) {
            if (params.filter_stopwords && textproc::is_stopword(token)) continue;
            ++kept;
            ++counts[token];
        }
        index.units_[u].token_count = kept;
        for (auto& [term, tf] : counts)
            index.inverted_[term].push_back({static_cast<int>(u), tf});
    }
    for (auto& [term, postings] : index.inverted_) {
        std::sort(postings.begin(), postings.end(),
                  [&](const MultiGranularityIndex::Posting& a,
                      const MultiGranularityIndex::Posting& b) {
                      return index.units_[a.unit].node_id < index.units_[b.unit].node_id;
                  });
    }

    if (provider) {
        std::vector<std::string> texts;
        texts.reserve(index.units_.size());
        for (const auto& u : index.units_) texts.push_back(u.text);
        try {
            index.dense_ = provider->embed(texts);
            index.provider_identity_ = provider->identity();
        } catch (const std::exception&) {
            // Sparse-only index remains valid.
            index.dense_.clear();
            index.provider_identity_.clear();
        }
    }
    return index;
}

MultiGranularityIndex build_index(const DocNode& tree, embedding::EmbeddingProvider* provider,
                                  const Bm25Params& params) {
    return build_index(std::vector<DocNode>{tree}, provider, params);
}

namespace {

// Raw BM25 with per-level statistics (Lucene-style idf, nonnegative).
std::unordered_map<int, double> bm25_scores(const MultiGranularityIndex& index,
                                            const std::string& query,
                                            std::optional<Level> level,
                                            const Bm25Params& params) {
    std::unordered_map<std::string, size_t> qtf;
    for (const auto& term : query_terms(query, params)) ++qtf[term];

    // Per-level averages, computed once.
    double avg[3];
    size_t count[3];
    for (Level l : {Level::Document, Level::Section, Level::Paragraph}) {
        avg[int(l)] = index.level_avg_tokens(l);
        count[int(l)] = index.level_unit_count(l);
    }

    std::unordered_map<int, double> scores;
    for (const auto& [term, q_count] : qtf) {
        const auto& postings = index.postings(term);
        if (postings.empty()) continue;
        size_t df[3] = {0, 0, 0};
        for (const auto& p : postings) ++df[int(index.units()[p.unit].level)];
        for (const auto& p : postings) {
            const auto& unit = index.units()[p.unit];
            if (level && unit.level != *level) continue;
            int l = int(unit.level);
            if (count[l] == 0 || df[l] == 0) continue;
            double idf = std::log((double(count[l]) + 1.0) / (double(df[l]) + 0.5));
            double norm_len = avg[l] > 0 ? double(unit.token_count) / avg[l] : 1.0;
            double tf = double(p.term_frequency);
            double weight = tf / (tf + params.k1 * (1.0 - params.b + params.b * norm_len));
            scores[p.unit] += double(q_count) * idf * weight;
        }
    }
    return scores;
}

std::vector<RetrievalHit> top_k_hits(const MultiGranularityIndex& index,
                                     std::vector<std::pair<int, double>> scored, size_t k) {
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return index.units()[a.first].node_id < index.units()[b.first].node_id;
    });
    if (scored.size() > k) scored.resize(k);
    std::vector<RetrievalHit> hits;
    hits.reserve(scored.size());
    for (const auto& [unit, score] : scored) {
        const auto& u = index.units()[unit];
        hits.push_back({u.node_id, u.level, score, u.text});
    }
    return hits;
}

std::optional<double> unit_cosine(const MultiGranularityIndex& index, int unit,
                                  const embedding::EmbeddingVector& query_vec) {
    const auto& v = index.dense_vector(unit);
    double dot = 0, nq = 0, nv = 0;
    for (size_t i = 0; i < query_vec.values.size() && i < v.values.size(); ++i) {
        dot += query_vec.values[i] * v.values[i];
        nq += query_vec.values[i] * query_vec.values[i];
        nv += v.values[i] * v.values[i];
    }
    if (nq == 0 || nv == 0) return std::nullopt;
    return std::clamp(dot / (std::sqrt(nq) * std::sqrt(nv)), -1.0, 1.0);
}

} // namespace

std::vector<RetrievalHit> search_sparse(const MultiGranularityIndex& index,
                                        const std::string& query, size_t k,
                                        std::optional<Level> level, const Bm25Params& params) {
    if (k == 0) throw ValidationError("search_sparse: k must be >= 1");
    auto scores = bm25_scores(index, query, level, params);
    std::vector<std::pair<int, double>> scored(scores.begin(), scores.end());
    return top_k_hits(index, std::move(scored), k);
}

std::vector<RetrievalHit> search_dense(const MultiGranularityIndex& index,
                                       const std::string& query, size_t k,
                                       embedding::EmbeddingProvider& provider,
                                       std::optional<Level> level) {
    if (k == 0) throw ValidationError("search_dense: k must be >= 1");
    if (!index.has_dense())
        throw OperationError("dense search is disabled: index has no vectors");
    auto query_vec = provider.embed({query}).at(0);
    std::vector<std::pair<int, double>> scored;
    for (size_t u = 0; u < index.units().size(); ++u) {
        if (level && index.units()[u].level != *level) continue;
        auto c = unit_cosine(index, static_cast<int>(u), query_vec);
        if (c) scored.emplace_back(static_cast<int>(u), *c);
    }
    return top_k_hits(index, std::move(scored), k);
}

EnsembleOutcome search_ensemble(const MultiGranularityIndex& index, const std::string& query,
                                size_t k, embedding::EmbeddingProvider* provider,
                                const Bm25Params& bm25, const EnsembleParams& ensemble,
                                std::optional<Level> level) {
    if (k == 0) throw ValidationError("search_ensemble: k must be >= 1");
    EnsembleOutcome outcome;
    const size_t fetch = ensemble.over_retrieve * k;

    auto sparse_hits = search_sparse(index, query, fetch, level, bm25);
    if (!index.has_dense() || !provider) {
        outcome.dense_unavailable = true;
        if (sparse_hits.size() > k) sparse_hits.resize(k);
        outcome.hits = std::move(sparse_hits);
        return outcome;
    }
    auto dense_hits = search_dense(index, query, fetch, *provider, level);

    // Min-max normalize each list, then merge by unit.
    std::unordered_map<std::string, double> merged;
    std::unordered_map<std::string, const RetrievalHit*> by_id;
    auto fold_in = [&](const std::vector<RetrievalHit>& hits, double weight) {
        if (hits.empty()) return;
        double lo = hits.back().score, hi = hits.front().score;
        for (const auto& hit : hits) {
            lo = std::min(lo, hit.score);
            hi = std::max(hi, hit.score);
        }
        for (const auto& hit : hits) {
            merged[hit.node_id] += weight * minmax(hit.score, lo, hi);
            by_id.emplace(hit.node_id, &hit);
        }
    };
    fold_in(sparse_hits, ensemble.sparse_weight);
    fold_in(dense_hits, ensemble.dense_weight);

    std::vector<std::pair<std::string, double>> scored(merged.begin(), merged.end());
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (scored.size() > k) scored.resize(k);
    for (const auto& [node_id, score] : scored) {
        const RetrievalHit* src = by_id.at(node_id);
        outcome.hits.push_back({node_id, src->level, score, src->text});
    }
    return outcome;
}

std::vector<RetrievalHit> search_adaptive(const MultiGranularityIndex& index,
                                          const std::string& query, size_t k,
                                          embedding::EmbeddingProvider* provider,
                                          const AdaptiveParams& adaptive, const Bm25Params& bm25,
                                          const EnsembleParams& ensemble) {
    if (k == 0) throw ValidationError("search_adaptive: k must be >= 1");

    // Normalized ensemble score for every unit, min-max per level over the
    // whole corpus so scores are comparable among siblings and documents.
    const auto sparse_raw = bm25_scores(index, query, std::nullopt, bm25);
    std::optional<embedding::EmbeddingVector> query_vec;
    if (index.has_dense() && provider) query_vec = provider->embed({query}).at(0);

    const size_t n_units = index.units().size();
    std::vector<double> sparse(n_units, 0.0), dense(n_units, 0.0), score(n_units, 0.0);
    for (const auto& [unit, s] : sparse_raw) sparse[unit] = s;
    if (query_vec) {
        for (size_t u = 0; u < n_units; ++u) {
            auto c = unit_cosine(index, static_cast<int>(u), *query_vec);
            dense[u] = c.value_or(0.0);
        }
    }
    for (Level level : {Level::Document, Level::Section, Level::Paragraph}) {
        double s_lo = 0, s_hi = 0, d_lo = 0, d_hi = 0;
        bool any = false;
        for (size_t u = 0; u < n_units; ++u) {
            if (index.units()[u].level != level) continue;
            if (!any) {
                s_lo = s_hi = sparse[u];
                d_lo = d_hi = dense[u];
                any = true;
            }
            s_lo = std::min(s_lo, sparse[u]);
            s_hi = std::max(s_hi, sparse[u]);
            d_lo = std::min(d_lo, dense[u]);
            d_hi = std::max(d_hi, dense[u]);
        }
        if (!any) continue;
        for (size_t u = 0; u < n_units; ++u) {
            if (index.units()[u].level != level) continue;
            double merged = ensemble.sparse_weight * minmax(sparse[u], s_lo, s_hi);
            if (query_vec) merged += ensemble.dense_weight * minmax(dense[u], d_lo, d_hi);
            score[u] = merged;
        }
    }

    std::vector<RetrievalHit> hits;
    for (int root : index.document_roots()) {
        const auto& doc = index.units()[root];

        // Descend while the best score at the level stays below the
        // threshold; stop at paragraphs.
        std::vector<int> level_units{root};
        Level level = Level::Document;
        while (score[*std::max_element(level_units.begin(), level_units.end(),
                                       [&](int a, int b) { return score[a] < score[b]; })] <
                   adaptive.descent_threshold &&
               level != Level::Paragraph) {
            std::vector<int> next;
            for (int u : level_units)
                for (int child : index.units()[u].children) next.push_back(child);
            if (next.empty()) break;
            level_units = std::move(next);
            level = index.units()[level_units.front()].level;
        }

        double best = 0.0;
        for (int u : level_units) best = std::max(best, score[u]);
        std::vector<int> kept;
        for (int u : level_units)
            if (score[u] >= adaptive.sibling_ratio * best) kept.push_back(u);
        if (kept.empty()) kept = level_units;

        std::vector<std::string> texts;
        double sum = 0.0;
        for (int u : kept) {
            texts.push_back(index.units()[u].text);
            sum += score[u];
        }
        hits.push_back({doc.node_id, level, kept.empty() ? 0.0 : sum / double(kept.size()),
                        join_lines(texts)});
    }

    std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.node_id < b.node_id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

void MultiGranularityIndex::save(const std::filesystem::path& file) const {
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["stopwords_filtered"] = stopwords_filtered_;
    nlohmann::json units = nlohmann::json::array();
    for (const auto& u : units_) {
        units.push_back({{"id", u.node_id},
                         {"level", to_string(u.level)},
                         {"text", u.text},
                         {"tokens", u.token_count},
                         {"parent", u.parent},
                         {"children", u.children},
                         {"document", u.document}});
    }
    doc["units"] = std::move(units);
    doc["roots"] = roots_;
    nlohmann::json inverted = nlohmann::json::object();
    for (const auto& [term, postings] : inverted_) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& p : postings) list.push_back({p.unit, p.term_frequency});
        inverted[term] = std::move(list);
    }
    doc["inverted"] = std::move(inverted);
    if (!dense_.empty()) {
        nlohmann::json vectors = nlohmann::json::array();
        for (const auto& v : dense_) vectors.push_back(v.values);
        doc["dense"] = {{"provider", provider_identity_}, {"vectors", std::move(vectors)}};
    }

    std::filesystem::path tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw OperationError("cannot write index file: " + tmp.string());
        out << doc.dump();
    }
    std::filesystem::rename(tmp, file);
}

MultiGranularityIndex MultiGranularityIndex::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw OperationError("cannot open index file: " + file.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw OperationError("index file is not valid JSON: " + file.string() + ": " + e.what());
    }
    if (doc.value("format_version", 0) != 1)
        throw OperationError("unsupported index format version in " + file.string());

    MultiGranularityIndex index;
    index.stopwords_filtered_ = doc.value("stopwords_filtered", false);
    for (const auto& u : doc.at("units")) {
        Unit unit;
        unit.node_id = u.at("id").get<std::string>();
        unit.level = parse_level(u.at("level").get<std::string>());
        unit.text = u.at("text").get<std::string>();
        unit.token_count = u.at("tokens").get<size_t>();
        unit.parent = u.at("parent").get<int>();
        unit.children = u.at("children").get<std::vector<int>>();
        unit.document = u.at("document").get<int>();
        index.units_.push_back(std::move(unit));
    }
    index.roots_ = doc.at("roots").get<std::vector<int>>();
    for (const auto& [term, list] : doc.at("inverted").items()) {
        std::vector<Posting> postings;
        for (const auto& entry : list)
            postings.push_back({entry.at(0).get<int>(), entry.at(1).get<size_t>()});
        index.inverted_.emplace(term, std::move(postings));
    }
    if (doc.contains("dense")) {
        index.provider_identity_ = doc["dense"].value("provider", "");
        for (const auto& row : doc["dense"]["vectors"]) {
            embedding::EmbeddingVector vec;
            vec.values = row.get<std::vector<double>>();
            index.dense_.push_back(std::move(vec));
        }
    }
    return index;
}

} // namespace ragcheck::retrieval
