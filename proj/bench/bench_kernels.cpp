// Serial reference kernels against their OpenMP versions.

#include "ikgate/kernels.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

using namespace ikgate;

namespace {

struct Data {
    std::vector<double> ik, norag, rag, cuts;
    std::vector<unsigned char> pos;
};

const Data& data(std::size_t n) {
    static std::map<std::size_t, Data> cache;
    auto& d = cache[n];
    if (d.ik.empty()) {
        std::mt19937_64 rng(n);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            d.ik.push_back(u(rng));
            d.norag.push_back(static_cast<double>(rng() % 2));
            d.rag.push_back(static_cast<double>(rng() % 2));
            d.pos.push_back(static_cast<unsigned char>(rng() % 2));
        }
        for (int i = 0; i <= 100; ++i) d.cuts.push_back(i / 100.0);
    }
    return d;
}

template <auto Sweep>
void BM_Sweep(benchmark::State& state) {
    const auto& d = data(static_cast<std::size_t>(state.range(0)));
    std::vector<kernels::RowStats> out(d.cuts.size());
    for (auto _ : state) {
        Sweep(kernels::RoutingColumns{d.ik, d.norag, d.rag}, d.cuts, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<long>(d.cuts.size()));
}

template <auto Histogram>
void BM_Histogram(benchmark::State& state) {
    const auto& d = data(static_cast<std::size_t>(state.range(0)));
    std::vector<std::size_t> bins(20);
    for (auto _ : state) {
        Histogram(d.ik, bins);
        benchmark::DoNotOptimize(bins.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Auc>
void BM_Auc(benchmark::State& state) {
    const auto& d = data(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(Auc(d.ik, d.pos));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Sweep<kernels::sweep_serial>)->Name("sweep/serial")->UseRealTime()->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Sweep<kernels::sweep_parallel>)->Name("sweep/openmp")->UseRealTime()->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Histogram<kernels::histogram_serial>)->Name("histogram/serial")->UseRealTime()->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK(BM_Histogram<kernels::histogram_parallel>)->Name("histogram/openmp")->UseRealTime()->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK(BM_Auc<kernels::auc_pairwise_serial>)->Name("auc/pairwise_serial")->UseRealTime()->Arg(1 << 10)->Arg(1 << 13);
BENCHMARK(BM_Auc<kernels::auc_pairwise_parallel>)->Name("auc/pairwise_openmp")->UseRealTime()->Arg(1 << 10)->Arg(1 << 13);
BENCHMARK(BM_Auc<kernels::auc_midrank>)->Name("auc/midrank")->UseRealTime()->Arg(1 << 10)->Arg(1 << 13)->Arg(1 << 20);

BENCHMARK_MAIN();
