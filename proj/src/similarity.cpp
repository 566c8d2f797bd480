#include "ragcheck/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "ragcheck/errors.hpp"

namespace ragcheck::similarity {

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.dim() != v.dim())
        throw ValidationError("cosine: dimension mismatch (" + std::to_string(u.dim()) +
                              " vs " + std::to_string(v.dim()) + ")");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (size_t i = 0; i < u.values.size(); ++i) {
        dot += u.values[i] * v.values[i];
        nu += u.values[i] * u.values[i];
        nv += v.values[i] * v.values[i];
    }
    if (nu == 0.0 || nv == 0.0) throw ValidationError("cosine: zero vector");
    return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

AlignmentPath align_lcs(const textproc::TokenSequence& a, const textproc::TokenSequence& b) {
    const size_t n = a.size();
    const size_t m = b.size();
    AlignmentPath path;
    if (n == 0 || m == 0) return path;

    // dp[(i)*(m+1)+j] = LCS length of a[0..i) and b[0..j).
    std::vector<int> dp((n + 1) * (m + 1), 0);
    auto at = [&](size_t i, size_t j) -> int& { return dp[i * (m + 1) + j]; };
    for (size_t i = 1; i <= n; ++i) {
        for (size_t j = 1; j <= m; ++j) {
            if (a.tokens[i - 1] == b.tokens[j - 1])
                at(i, j) = at(i - 1, j - 1) + 1;
            else
                at(i, j) = std::max(at(i - 1, j), at(i, j - 1));
        }
    }

    // Backtrace: match first, else advance in a, else in b.
    size_t i = n, j = m;
    while (i > 0 && j > 0) {
        if (a.tokens[i - 1] == b.tokens[j - 1]) {
            path.pairs.emplace_back(i - 1, j - 1);
            --i;
            --j;
        } else if (at(i - 1, j) >= at(i, j - 1)) {
            --i;
        } else {
            --j;
        }
    }
    std::reverse(path.pairs.begin(), path.pairs.end());
    return path;
}

size_t phrase_length_bound(size_t shorter_len, const OverlapOptions& options) {
    // ceil(0.3 * L) computed in integers to dodge float rounding at 3.0, 6.0, ...
    size_t three_tenths = (3 * shorter_len + 9) / 10;
    return options.use_max_bound ? std::max<size_t>(4, three_tenths)
                                 : std::min<size_t>(4, three_tenths);
}

double overlap_ratio(const textproc::TokenSequence& a, const textproc::TokenSequence& b,
                     const OverlapOptions& options) {
    if (a.empty() || b.empty()) throw ValidationError("overlap_ratio: empty token sequence");

    // Canonical argument order (size, then token list) so the tie-broken
    // alignment, and with it the phrase set, is a function of the unordered pair.
    const textproc::TokenSequence* first = &a;
    const textproc::TokenSequence* second = &b;
    if (a.size() > b.size() ||
        (a.size() == b.size() &&
         std::lexicographical_compare(b.tokens.begin(), b.tokens.end(), a.tokens.begin(),
                                      a.tokens.end())))
        std::swap(first, second);

    const AlignmentPath path = align_lcs(*first, *second);
    const size_t shorter = std::min(a.size(), b.size());
    const size_t bound = phrase_length_bound(shorter, options);

    size_t kept = 0;
    size_t run = 0;
    for (size_t p = 0; p < path.pairs.size(); ++p) {
        if (p > 0 && path.pairs[p].first == path.pairs[p - 1].first + 1 &&
            path.pairs[p].second == path.pairs[p - 1].second + 1) {
            ++run;
        } else {
            if (run > bound) kept += run;
            run = 1;
        }
    }
    if (run > bound) kept += run;

    double ratio = static_cast<double>(kept) / static_cast<double>(shorter);
    return std::clamp(ratio, 0.0, 1.0);
}

} // namespace ragcheck::similarity
