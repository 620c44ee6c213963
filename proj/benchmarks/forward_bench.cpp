#include <benchmark/benchmark.h>

#include "hardattn/backward.hpp"
#include "hardattn/constructions.hpp"
#include "hardattn/train.hpp"
#include "hardattn/transformer.hpp"

using namespace hardattn;

namespace {

TokenSeq random_string(std::size_t len, std::uint64_t seed = 1) {
  RngStream rng(seed);
  return TokenSeq::from_bits(sample_string(len, rng));
}

ModelParams trained_shape(Task task) {
  TrainConfig config;
  config.task = task;
  RngStream rng(0);
  return init_params(config, rng);
}

}  // namespace

static void BM_ParityConstruction(benchmark::State& state) {
  const ModelParams p = build_parity();
  const TokenSeq seq = random_string(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(encoder_forward(p, seq).logit);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ParityConstruction)->RangeMultiplier(10)->Range(10, 10000)->Complexity();

static void BM_WrappedParityLnZero(benchmark::State& state) {
  const ModelParams p = amplifier_append_scaled(negation_wrap(build_parity(), NormMode::layer_norm(0.0)), 1.0);
  const TokenSeq seq = random_string(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(encoder_forward(p, seq).logit);
}
BENCHMARK(BM_WrappedParityLnZero)->Arg(10)->Arg(100)->Arg(1000);

static void BM_TrainedShapeForward(benchmark::State& state) {
  const ModelParams p = trained_shape(Task::First);
  const TokenSeq seq = random_string(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(encoder_forward(p, seq).logit);
}
BENCHMARK(BM_TrainedShapeForward)->Arg(10)->Arg(100)->Arg(1000);

static void BM_Backward(benchmark::State& state) {
  const ModelParams p = trained_shape(state.range(1) ? Task::Parity : Task::First);
  const TokenSeq seq = random_string(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(backward(p, seq, true).loss);
}
BENCHMARK(BM_Backward)->Args({10, 0})->Args({100, 0})->Args({300, 0})->Args({100, 1});
BENCHMARK_MAIN();
