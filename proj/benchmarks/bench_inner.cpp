#include <benchmark/benchmark.h>

#include <string>

#include "qmfnet/inner_code.hpp"
#include "qmfnet/network.hpp"
#include "qmfnet/quantize.hpp"
#include "qmfnet/rng.hpp"

namespace {

constexpr double kCompStd = 0.7071067811865476;

std::string diamond_json(double gain) {
  const std::string g = std::to_string(gain);
  std::string s =
      R"({"nodes":[{"id":"S","layer":1},{"id":"A","layer":2},{"id":"B","layer":2},{"id":"D","layer":3}],)";
  s += R"("edges":[{"from":"S","to":"A","re":)" + g + R"(},{"from":"S","to":"B","re":)" + g +
       R"(},{"from":"A","to":"D","re":)" + g + R"(},{"from":"B","to":"D","re":)" + g + R"(}],)";
  s += R"("source":"S","sink":"D"})";
  return s;
}

void BM_BuildZlExact(benchmark::State& state) {
  const auto ell = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(qmf::NoiseSetBundle::build_exact(ell, 1.0));
}
BENCHMARK(BM_BuildZlExact)->Arg(1)->Arg(2)->Arg(3);

void BM_QMembership(benchmark::State& state) {
  const auto ell = static_cast<std::size_t>(state.range(0));
  const auto bundle = qmf::NoiseSetBundle::build_exact(ell, 1.0);
  qmf::GaussianStream s(7);
  qmf::GaussianIntTuple t(ell);
  for (auto _ : state) {
    for (std::size_t i = 0; i < ell; ++i)
      t.set(i, qmf::round_complex(s.next_complex(1.0)));
    benchmark::DoNotOptimize(bundle.q_contains(t));
  }
}
BENCHMARK(BM_QMembership)->Arg(1)->Arg(2)->Arg(3);

void BM_DecodeChunkDiamond(benchmark::State& state) {
  const auto ell = static_cast<std::size_t>(state.range(0));
  const auto net = qmf::load_network_string(diamond_json(300.0));
  const auto bundle = qmf::NoiseSetBundle::build_exact(ell, kCompStd);
  const qmf::InnerCodeInstance inst(net, ell, 1.0, 1, 0, kCompStd);
  qmf::GaussianStream s(9);
  for (auto _ : state) {
    state.PauseTiming();
    qmf::ComplexBlock obs(ell);
    for (auto& z : obs) z = s.next_complex(450.0);
    state.ResumeTiming();
    benchmark::DoNotOptimize(qmf::decode_chunk(inst, net, bundle, obs));
  }
}
BENCHMARK(BM_DecodeChunkDiamond)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

void BM_RelayForward(benchmark::State& state) {
  const auto net = qmf::load_network_string(diamond_json(10.0));
  const qmf::InnerCodeInstance inst(net, 4, 1.0, 1, 0, kCompStd);
  const int relay = net.node_index("A");
  qmf::GaussianStream s(11);
  qmf::ComplexBlock y(4);
  for (auto& z : y) z = s.next_complex(5.0);
  for (auto _ : state) benchmark::DoNotOptimize(inst.relay_forward(relay, y));
}
BENCHMARK(BM_RelayForward);

}  // namespace
