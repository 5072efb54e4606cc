#include "ikgate/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace ikgate::kernels {

namespace {

RowStats sweep_row(const RoutingColumns& cols, double cut) {
    const std::size_t n = cols.ik.size();
    double sum = 0.0;
    std::size_t retrieved = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (cols.ik[i] < cut) {
            sum += cols.eval_rag[i];
            ++retrieved;
        } else {
            sum += cols.eval_norag[i];
        }
    }
    const double dn = static_cast<double>(n);
    return {sum / dn, static_cast<double>(retrieved) / dn};
}

std::size_t bin_of(double v, std::size_t nbins) {
    if (!(v > 0.0)) return 0;
    auto b = static_cast<std::size_t>(v * static_cast<double>(nbins));
    return std::min(b, nbins - 1);
}

}  // namespace

void sweep_serial(const RoutingColumns& cols, std::span<const double> cuts, std::span<RowStats> out) {
    for (std::size_t g = 0; g < cuts.size(); ++g) out[g] = sweep_row(cols, cuts[g]);
}

void sweep_parallel(const RoutingColumns& cols, std::span<const double> cuts, std::span<RowStats> out) {
    const auto rows = static_cast<long>(cuts.size());
#pragma omp parallel for schedule(static)
    for (long g = 0; g < rows; ++g) out[g] = sweep_row(cols, cuts[g]);
}

void histogram_serial(std::span<const double> values, std::span<std::size_t> bins) {
    std::fill(bins.begin(), bins.end(), std::size_t{0});
    for (double v : values) ++bins[bin_of(v, bins.size())];
}

void histogram_parallel(std::span<const double> values, std::span<std::size_t> bins) {
    std::fill(bins.begin(), bins.end(), std::size_t{0});
    const std::size_t nbins = bins.size();
    std::size_t* counts = bins.data();
    const auto n = static_cast<long>(values.size());
#pragma omp parallel for reduction(+ : counts[:nbins])
    for (long i = 0; i < n; ++i) ++counts[bin_of(values[i], nbins)];
}

double auc_pairwise_serial(std::span<const double> scores, std::span<const unsigned char> positive) {
    long long doubled = 0;  // 2 per win, 1 per tie
    long long n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) (positive[i] ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) return std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!positive[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (positive[j]) continue;
            doubled += scores[i] > scores[j] ? 2 : (scores[i] == scores[j] ? 1 : 0);
        }
    }
    return static_cast<double>(doubled) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double auc_pairwise_parallel(std::span<const double> scores, std::span<const unsigned char> positive) {
    long long doubled = 0;
    long long n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) (positive[i] ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) return std::numeric_limits<double>::quiet_NaN();
    const auto n = static_cast<long>(scores.size());
#pragma omp parallel for reduction(+ : doubled) schedule(dynamic, 64)
    for (long i = 0; i < n; ++i) {
        if (!positive[i]) continue;
        for (long j = 0; j < n; ++j) {
            if (positive[j]) continue;
            doubled += scores[i] > scores[j] ? 2 : (scores[i] == scores[j] ? 1 : 0);
        }
    }
    return static_cast<double>(doubled) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double auc_midrank(std::span<const double> scores, std::span<const unsigned char> positive) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Doubled rank sum keeps every midrank an integer.
    long long doubled_rank_sum = 0;
    long long n_pos = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const long long doubled_midrank = static_cast<long long>(i + 1) + static_cast<long long>(j + 1);
        for (std::size_t k = i; k <= j; ++k) {
            if (positive[order[k]]) {
                doubled_rank_sum += doubled_midrank;
                ++n_pos;
            }
        }
        i = j + 1;
    }
    const long long n_neg = static_cast<long long>(n) - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::numeric_limits<double>::quiet_NaN();
    const long long doubled_u = doubled_rank_sum - n_pos * (n_pos + 1);
    return static_cast<double>(doubled_u) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace ikgate::kernels
