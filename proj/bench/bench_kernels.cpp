// Serial reference loops against the OpenMP versions, plus dense matvec
// against the butterfly apply.

#include <benchmark/benchmark.h>

#include "gak/butterfly.hpp"
#include "gak/kernels.hpp"
#include "gak/pairwise.hpp"
#include "gak/rng.hpp"
#include "gak/tree.hpp"

namespace {

gak::DenseMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    gak::SeededRng rng(seed);
    gak::DenseMatrix M(r, c);
    for (std::size_t i = 0; i < M.size(); ++i) M.data()[i] = rng.normal();
    return M;
}

std::vector<gak::Segment> halves(std::size_t n) {
    std::vector<gak::Segment> s;
    for (std::size_t len = n; len >= 1; len /= 2)
        for (std::size_t st = 0; st + len <= n; st += len) s.push_back({st, len, 1.0 / static_cast<double>(len)});
    return s;
}

template <gak::DenseMatrix (*F)(const gak::DenseMatrix&, std::span<const double>)>
void BM_weighted_l1(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const gak::DenseMatrix M = random_matrix(n, n, 1);
    const std::vector<double> w(n, 1.0);
    for (auto _ : st) benchmark::DoNotOptimize(F(M, w));
}

template <gak::DenseMatrix (*F)(const gak::DenseMatrix&, std::span<const gak::Segment>)>
void BM_segments(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const gak::DenseMatrix M = random_matrix(n, n, 2);
    const auto segs = halves(n);
    for (auto _ : st) benchmark::DoNotOptimize(F(M, segs));
}

template <void (*F)(const double*, std::size_t, std::size_t, const double*, double*)>
void BM_matvec(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const gak::DenseMatrix M = random_matrix(n, 2 * n, 3);
    std::vector<double> x(2 * n, 1.0), y(n);
    for (auto _ : st) {
        F(M.data(), n, 2 * n, x.data(), y.data());
        benchmark::DoNotOptimize(y.data());
    }
}

void BM_butterfly_apply(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const gak::KernelMatrix km = gak::sine_kernel(n, 1);
    const gak::DenseMatrix K = km.natural();
    const auto F = gak::butterfly_factor(K, gak::PartitionTree::dyadic(n), gak::PartitionTree::dyadic(2 * n));
    const std::vector<double> x(2 * n, 1.0);
    for (auto _ : st) benchmark::DoNotOptimize(F.apply(x));
}

}  // namespace

BENCHMARK(BM_weighted_l1<gak::ref::pairwise_weighted_l1>)->Arg(256)->Arg(512)->Name("weighted_l1/serial");
BENCHMARK(BM_weighted_l1<gak::par::pairwise_weighted_l1>)->Arg(256)->Arg(512)->Name("weighted_l1/openmp");
BENCHMARK(BM_segments<gak::ref::pairwise_segment_l2>)->Arg(256)->Arg(512)->Name("segment_l2/serial");
BENCHMARK(BM_segments<gak::par::pairwise_segment_l2>)->Arg(256)->Arg(512)->Name("segment_l2/openmp");
BENCHMARK(BM_segments<gak::ref::pairwise_segment_abs_dot>)->Arg(256)->Arg(512)->Name("segment_abs_dot/serial");
BENCHMARK(BM_segments<gak::par::pairwise_segment_abs_dot>)->Arg(256)->Arg(512)->Name("segment_abs_dot/openmp");
BENCHMARK(BM_matvec<gak::ref::matvec>)->Arg(1024)->Arg(2048)->Name("matvec/serial");
BENCHMARK(BM_matvec<gak::par::matvec>)->Arg(1024)->Arg(2048)->Name("matvec/openmp");
BENCHMARK(BM_butterfly_apply)->Arg(1024)->Arg(2048)->Name("butterfly_apply");

BENCHMARK_MAIN();
