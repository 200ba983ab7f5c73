// Serial reference kernels against their OpenMP counterparts.

#include "hrfna/kernels.hpp"
#include "hrfna/workloads.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numeric>
#include <random>

namespace {

using namespace hrfna;
using namespace hrfna::kernels;

const ModulusSet& default_set() {
  static const ModulusSet ms = ModulusSet::default_set();
  return ms;
}

std::vector<std::uint64_t> values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::vector<std::uint64_t> v(n);
  for (auto& x : v) x = g() % 68568575985ull;
  return v;
}

std::vector<HybridNum> reals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::vector<HybridNum> v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    v.push_back(from_real(std::ldexp(static_cast<double>(g() >> 11), -53) * 4 - 2, default_set(), {}));
  return v;
}

template <bool Par>
void BM_Encode(benchmark::State& state) {
  const auto v = values(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    auto b = Par ? parallel::encode(v, default_set()) : serial::encode(v, default_set());
    benchmark::DoNotOptimize(b);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Par>
void BM_Reconstruct(benchmark::State& state) {
  const auto b = serial::encode(values(static_cast<std::size_t>(state.range(0)), 2), default_set());
  for (auto _ : state) {
    auto v = Par ? parallel::reconstruct(b) : serial::reconstruct(b);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Par>
void BM_ModMul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = serial::encode(values(n, 3), default_set());
  const auto b = serial::encode(values(n, 4), default_set());
  for (auto _ : state) {
    auto c = Par ? parallel::mod_mul(a, b) : serial::mod_mul(a, b);
    benchmark::DoNotOptimize(c);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Par>
void BM_HybridMul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = reals(n, 5), y = reals(n, 6);
  for (auto _ : state) {
    auto z = Par ? parallel::hybrid_mul(x, y, default_set(), {}) : serial::hybrid_mul(x, y, default_set(), {});
    benchmark::DoNotOptimize(z);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Execution E>
void BM_MacSweep(benchmark::State& state) {
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(state.range(0)));
  std::iota(seeds.begin(), seeds.end(), 1);
  for (auto _ : state) {
    auto r = chained_mac_sweep(seeds, 1000, default_set(), {}, E);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Encode<false>)->Name("encode/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Encode<true>)->Name("encode/parallel")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Reconstruct<false>)->Name("reconstruct/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Reconstruct<true>)->Name("reconstruct/parallel")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_ModMul<false>)->Name("mod_mul/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_ModMul<true>)->Name("mod_mul/parallel")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_HybridMul<false>)->Name("hybrid_mul/serial")->Arg(1 << 12);
BENCHMARK(BM_HybridMul<true>)->Name("hybrid_mul/parallel")->Arg(1 << 12);
BENCHMARK(BM_MacSweep<Execution::serial>)->Name("mac_sweep/serial")->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MacSweep<Execution::parallel>)->Name("mac_sweep/parallel")->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
