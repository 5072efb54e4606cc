#pragma once

// Reference computations written straight from the definitions. Nothing here
// calls into the library.

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

namespace oracle {

/// Pairwise Mann-Whitney AUC: P(score_pos > score_neg) + 0.5 P(equal).
inline double auc_brute_force(const std::vector<double>& scores, const std::vector<int>& positive) {
    long long wins2 = 0, pos = 0, neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (positive[i]) ++pos; else ++neg;
    }
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!positive[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (positive[j]) continue;
            if (scores[i] > scores[j]) wins2 += 2;
            else if (scores[i] == scores[j]) wins2 += 1;
        }
    }
    return static_cast<double>(wins2) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

inline double accuracy_at_half(const std::vector<double>& ik, const std::vector<int>& positive) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < ik.size(); ++i) hit += ((ik[i] >= 0.5) == (positive[i] != 0));
    return static_cast<double>(hit) / static_cast<double>(ik.size());
}

/// Two-way softmax written with exponentials of each logit.
inline double softmax_yes(double yes, double no) {
    const double m = std::max(yes, no);
    const double ey = std::exp(yes - m), en = std::exp(no - m);
    return ey / (ey + en);
}

struct RoutedMean {
    double quality = 0.0;
    double retrieval = 0.0;
};

/// Retrieve when ik < cut. Sums in index order.
inline RoutedMean routed_mean(const std::vector<double>& ik, const std::vector<double>& norag,
                              const std::vector<double>& rag, double cut) {
    double q = 0.0;
    std::size_t retrieved = 0;
    for (std::size_t i = 0; i < ik.size(); ++i) {
        if (ik[i] < cut) {
            q += rag[i];
            ++retrieved;
        } else {
            q += norag[i];
        }
    }
    const double n = static_cast<double>(ik.size());
    return {q / n, static_cast<double>(retrieved) / n};
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Per-question path costs written out term by term.
inline double norag_path(double ik, double prefix, double norag_gen, bool use_prefix) {
    return use_prefix ? ik + prefix + norag_gen : ik + norag_gen;
}
inline double rag_path(double ik, double prefix, double retrieval, double rerank, double rag_gen, bool use_prefix) {
    return (use_prefix ? ik + prefix : ik) + retrieval + rerank + rag_gen;
}

/// Whitespace tokens of `s`.
inline std::vector<std::string> ws_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            if (!cur.empty()) out.push_back(cur), cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace oracle
