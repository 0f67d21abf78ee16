#include <benchmark/benchmark.h>

#include "qmfnet/polar.hpp"
#include "qmfnet/rng.hpp"

namespace {

qmf::BitVector random_bits(qmf::SplitMix64& gen, std::size_t n) {
  qmf::BitVector v(n);
  for (auto& b : v) b = static_cast<std::uint8_t>(gen.next_u64() & 1);
  return v;
}

void BM_PolarEncode(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const qmf::PolarCode code = qmf::construct_polar(n, 0.02, 0.5);
  qmf::SplitMix64 gen(1);
  const qmf::BitVector msg = random_bits(gen, code.info_count());
  for (auto _ : state) benchmark::DoNotOptimize(code.encode(msg));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_PolarEncode)->RangeMultiplier(4)->Range(1 << 8, 1 << 16)->Complexity();

void BM_PolarDecode(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const qmf::PolarCode code = qmf::construct_polar(n, 0.02, 0.5);
  qmf::SplitMix64 gen(2);
  qmf::BitVector x = code.encode(random_bits(gen, code.info_count()));
  for (auto& b : x)
    if (gen.next_unit() < 0.02) b ^= 1;
  for (auto _ : state) benchmark::DoNotOptimize(code.decode(x));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_PolarDecode)->RangeMultiplier(4)->Range(1 << 8, 1 << 16)->Complexity();

void BM_PolarConstruct(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qmf::construct_polar(n, 0.02, 0.5));
}
BENCHMARK(BM_PolarConstruct)->RangeMultiplier(4)->Range(1 << 8, 1 << 16);

}  // namespace

BENCHMARK_MAIN();
