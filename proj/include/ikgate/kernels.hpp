#pragma once

// Data-parallel evaluation kernels. Each kernel has a serial reference and an
// OpenMP version; the two produce bit-identical results (tested), and
// bench/bench_kernels.cpp compares their speed.

#include <cstddef>
#include <span>

namespace ikgate::kernels {

struct RoutingColumns {
    std::span<const double> ik;
    std::span<const double> eval_norag;
    std::span<const double> eval_rag;
};

struct RowStats {
    double mean_quality = 0.0;
    double retrieval_fraction = 0.0;
};

/// For each cut c in `cuts`: route query i to RAG iff ik[i] < c, then average
/// the chosen eval column. Per-row sums run in index order.
void sweep_serial(const RoutingColumns& cols, std::span<const double> cuts, std::span<RowStats> out);
void sweep_parallel(const RoutingColumns& cols, std::span<const double> cuts, std::span<RowStats> out);

/// Equal-width bins over [0, 1]; values at 1.0 land in the last bin and
/// out-of-range values are clamped.
void histogram_serial(std::span<const double> values, std::span<std::size_t> bins);
void histogram_parallel(std::span<const double> values, std::span<std::size_t> bins);

/// O(n^2) pairwise AUC: mean over (positive, negative) pairs of 1 / 0.5 / 0.
/// Returns NaN when a class is empty.
double auc_pairwise_serial(std::span<const double> scores, std::span<const unsigned char> positive);
double auc_pairwise_parallel(std::span<const double> scores, std::span<const unsigned char> positive);

/// O(n log n) Mann-Whitney AUC via midranks. Returns NaN when a class is empty.
double auc_midrank(std::span<const double> scores, std::span<const unsigned char> positive);

}  // namespace ikgate::kernels
