#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace oracles {
namespace {

bool is_subsequence(const std::vector<std::string>& needle,
                    const std::vector<std::string>& haystack) {
    size_t j = 0;
    for (size_t i = 0; i < haystack.size() && j < needle.size(); ++i)
        if (haystack[i] == needle[j]) ++j;
    return j == needle.size();
}

// LCS length of the prefixes a[0..i) x b[0..j), straight from the recurrence
// with memoization (no shared code with the production DP table).
int lcs_prefix(const std::vector<std::string>& a, const std::vector<std::string>& b, size_t i,
               size_t j, std::vector<std::vector<int>>& memo) {
    if (i == 0 || j == 0) return 0;
    int& slot = memo[i][j];
    if (slot >= 0) return slot;
    if (a[i - 1] == b[j - 1])
        return slot = 1 + lcs_prefix(a, b, i - 1, j - 1, memo);
    return slot = std::max(lcs_prefix(a, b, i - 1, j, memo), lcs_prefix(a, b, i, j - 1, memo));
}

// The documented tie-break, restated recursively: backtrace from the end,
// prefer a match, else step back in `a` when its prefix optimum is at least
// the other branch's, else step back in `b`.
void trace(const std::vector<std::string>& a, const std::vector<std::string>& b, size_t i,
           size_t j, std::vector<std::vector<int>>& memo,
           std::vector<std::pair<size_t, size_t>>& path) {
    if (i == 0 || j == 0) return;
    if (a[i - 1] == b[j - 1]) {
        trace(a, b, i - 1, j - 1, memo, path);
        path.emplace_back(i - 1, j - 1);
    } else if (lcs_prefix(a, b, i - 1, j, memo) >= lcs_prefix(a, b, i, j - 1, memo)) {
        trace(a, b, i - 1, j, memo, path);
    } else {
        trace(a, b, i, j - 1, memo, path);
    }
}

std::vector<std::pair<size_t, size_t>> tie_broken_path(const std::vector<std::string>& a,
                                                       const std::vector<std::string>& b) {
    std::vector<std::vector<int>> memo(a.size() + 1, std::vector<int>(b.size() + 1, -1));
    std::vector<std::pair<size_t, size_t>> path;
    trace(a, b, a.size(), b.size(), memo, path);
    return path;
}

} // namespace

size_t lcs_length_bruteforce(const std::vector<std::string>& a,
                             const std::vector<std::string>& b) {
    size_t best = 0;
    const size_t n = a.size();
    for (size_t mask = 0; mask < (size_t(1) << n); ++mask) {
        std::vector<std::string> candidate;
        for (size_t i = 0; i < n; ++i)
            if (mask & (size_t(1) << i)) candidate.push_back(a[i]);
        if (candidate.size() <= best) continue;
        if (is_subsequence(candidate, b)) best = candidate.size();
    }
    return best;
}

double overlap_ratio_bruteforce(const std::vector<std::string>& a,
                                const std::vector<std::string>& b, bool use_max_bound) {
    // Canonical order: by size, then lexicographic token list.
    const std::vector<std::string>* first = &a;
    const std::vector<std::string>* second = &b;
    if (a.size() > b.size() ||
        (a.size() == b.size() &&
         std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end())))
        std::swap(first, second);

    auto path = tie_broken_path(*first, *second);

    // Enumerate every maximal run where both indices advance by exactly one.
    std::vector<size_t> run_lengths;
    size_t run = 0;
    for (size_t p = 0; p < path.size(); ++p) {
        bool continues = p > 0 && path[p].first == path[p - 1].first + 1 &&
                         path[p].second == path[p - 1].second + 1;
        if (continues) {
            ++run;
        } else {
            if (run) run_lengths.push_back(run);
            run = 1;
        }
    }
    if (run) run_lengths.push_back(run);

    size_t shorter = std::min(a.size(), b.size());
    size_t three_tenths = (3 * shorter + 9) / 10; // exact ceil(0.3 * shorter)
    size_t bound = use_max_bound ? std::max<size_t>(4, three_tenths)
                                 : std::min<size_t>(4, three_tenths);
    size_t kept = 0;
    for (size_t len : run_lengths)
        if (len > bound) kept += len;
    double ratio = double(kept) / double(shorter);
    return std::min(1.0, std::max(0.0, ratio));
}

std::vector<ScoredUnit> bm25_bruteforce(
    const std::vector<std::pair<std::string, std::string>>& units, const std::string& query,
    double k1, double b) {
    using ragcheck::textproc::tokenize;

    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(units.size());
    double total_len = 0;
    for (const auto& [id, text] : units) {
        tokens.push_back(tokenize(text).tokens);
        total_len += double(tokens.back().size());
    }
    const double n_units = double(units.size());
    const double avgdl = n_units > 0 ? total_len / n_units : 0.0;

    auto query_tokens = tokenize(query).tokens;
    std::unordered_map<std::string, size_t> qtf;
    for (const auto& t : query_tokens) ++qtf[t];

    std::vector<ScoredUnit> scored;
    for (size_t u = 0; u < units.size(); ++u) {
        double score = 0.0;
        bool any = false;
        for (const auto& [term, q_count] : qtf) {
            size_t tf = size_t(std::count(tokens[u].begin(), tokens[u].end(), term));
            if (tf == 0) continue;
            size_t df = 0;
            for (const auto& doc_tokens : tokens)
                if (std::find(doc_tokens.begin(), doc_tokens.end(), term) != doc_tokens.end())
                    ++df;
            double idf = std::log((n_units + 1.0) / (double(df) + 0.5));
            double norm_len = avgdl > 0 ? double(tokens[u].size()) / avgdl : 1.0;
            double weight = double(tf) / (double(tf) + k1 * (1.0 - b + b * norm_len));
            score += double(q_count) * idf * weight;
            any = true;
        }
        if (any) scored.push_back({units[u].first, score});
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredUnit& x, const ScoredUnit& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.node_id < y.node_id;
    });
    return scored;
}

} // namespace oracles
