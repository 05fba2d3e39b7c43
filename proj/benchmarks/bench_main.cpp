#include <benchmark/benchmark.h>

#include <cstdint>
#include <utility>
#include <vector>

#include "flatbp/inference.hpp"
#include "flatbp/model_zoo.hpp"
#include "flatbp/oracle.hpp"
#include "flatbp/wiring.hpp"

namespace {

using namespace flatbp;

std::pair<CompiledGraph, Evidence> compiled_rbm(int32_t total_units, uint64_t seed = 0) {
  const RBMSpec rbm = random_rbm(total_units / 2, total_units / 2, seed);
  auto [graph, evidence] = rbm_to_factor_graph(rbm);
  return {compile(std::move(graph)), std::move(evidence)};
}

void BM_CompileRbm(benchmark::State& state) {
  const auto total_units = static_cast<int32_t>(state.range(0));
  const RBMSpec rbm = random_rbm(total_units / 2, total_units / 2, 0);
  for (auto _ : state) {
    auto [graph, evidence] = rbm_to_factor_graph(rbm);
    benchmark::DoNotOptimize(compile(std::move(graph)));
  }
}
BENCHMARK(BM_CompileRbm)->Arg(30)->Arg(60)->Arg(100)->Arg(200);

void BM_RunBpRbm(benchmark::State& state) {
  const auto [compiled, evidence] = compiled_rbm(static_cast<int32_t>(state.range(0)));
  BPOptions options;  // max-product, 200 iterations, damping 0.5
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_bp(compiled, evidence, options));
  }
  state.counters["edge_states"] = static_cast<double>(compiled.wiring().num_edge_states);
}
BENCHMARK(BM_RunBpRbm)->Arg(30)->Arg(60)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_RunBpRbmThreaded(benchmark::State& state) {
  const auto [compiled, evidence] = compiled_rbm(200);
  BPOptions options;
  options.num_threads = static_cast<int32_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_bp(compiled, evidence, options));
  }
}
BENCHMARK(BM_RunBpRbmThreaded)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_UpdateVtof(benchmark::State& state) {
  const auto [compiled, evidence] = compiled_rbm(200);
  const MessageState messages = init_messages(compiled);
  for (auto _ : state) {
    benchmark::DoNotOptimize(update_vtof(compiled, evidence, messages.ftov));
  }
}
BENCHMARK(BM_UpdateVtof);

void BM_UpdateFtovMax(benchmark::State& state) {
  const auto [compiled, evidence] = compiled_rbm(200);
  const MessageState messages = init_messages(compiled);
  const std::vector<double> vtof = update_vtof(compiled, evidence, messages.ftov);
  for (auto _ : state) {
    benchmark::DoNotOptimize(update_ftov(compiled, vtof));
  }
}
BENCHMARK(BM_UpdateFtovMax);

void BM_UpdateFtovSum(benchmark::State& state) {
  const auto [compiled, evidence] = compiled_rbm(200);
  const MessageState messages = init_messages(compiled);
  const std::vector<double> vtof = update_vtof(compiled, evidence, messages.ftov);
  BPOptions options;
  options.mode = BPMode::sum_product;
  for (auto _ : state) {
    benchmark::DoNotOptimize(update_ftov(compiled, vtof, options));
  }
}
BENCHMARK(BM_UpdateFtovSum);

void BM_Damp(benchmark::State& state) {
  const auto [compiled, evidence] = compiled_rbm(200);
  const MessageState messages = init_messages(compiled);
  const std::vector<double> vtof = update_vtof(compiled, evidence, messages.ftov);
  const std::vector<double> raw = update_ftov(compiled, vtof);
  for (auto _ : state) {
    benchmark::DoNotOptimize(damp(compiled, messages.ftov, raw));
  }
}
BENCHMARK(BM_Damp);

void BM_BruteForceMapRbm(benchmark::State& state) {
  const auto [compiled, evidence] = compiled_rbm(16, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute_force_map(compiled, evidence));
  }
}
BENCHMARK(BM_BruteForceMapRbm)->Unit(benchmark::kMillisecond);

void BM_RbmExactMap(benchmark::State& state) {
  const RBMSpec rbm = random_rbm(15, 15, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rbm_exact_map(rbm));
  }
}
BENCHMARK(BM_RbmExactMap)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
