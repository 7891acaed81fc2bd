#include <benchmark/benchmark.h>

#include "collapse/collapse.hpp"

using namespace collapse;

namespace {

const TextDataset& dataset() {
  static const TextDataset d = make_text_dataset(TextWorldParams{});
  return d;
}

MarkovTextLearner trained() {
  MarkovTextLearner m(64, 2, 5e-4);
  m.train(dataset().real);
  return m;
}

void BM_Train(benchmark::State& state) {
  for (auto _ : state) {
    MarkovTextLearner m(64, 2, 5e-4);
    m.train(dataset().real);
    benchmark::DoNotOptimize(m.tables().size());
  }
}
BENCHMARK(BM_Train);

void BM_Generate(benchmark::State& state) {
  const auto m = trained();
  GenerateOptions opt;
  opt.n = static_cast<std::size_t>(state.range(0));
  opt.max_len = 64;
  opt.prompt_tokens = 2;
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(m.generate(opt, rng).size());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Generate)->Arg(100)->Arg(800);

void BM_Snapshot(benchmark::State& state) {
  const auto m = trained();
  Rng rng(2);
  GenerateOptions opt;
  opt.n = 800;
  opt.max_len = 64;
  const Corpus pool = m.generate(opt, rng);
  const std::vector<std::vector<double>> hist = {m.representation(dataset().anchors)};
  for (auto _ : state) benchmark::DoNotOptimize(snapshot_all(m, dataset(), pool, MonitorConfig{}, hist, 1).H);
}
BENCHMARK(BM_Snapshot);

void BM_CheckpointRoundTrip(benchmark::State& state) {
  const AnyLearner m = trained();
  const Checkpoint ck = snapshot(m, 0, Rng(0));
  for (auto _ : state) benchmark::DoNotOptimize(deserialize(serialize(ck)).generation);
}
BENCHMARK(BM_CheckpointRoundTrip);

void BM_ClassifierStep(benchmark::State& state) {
  const FeatureDataset d = make_feature_dataset(FeatureWorldParams{});
  SoftmaxClassifierLearner c(10, 8, 0.5);
  for (auto _ : state) c.train(d.real, 1);
}
BENCHMARK(BM_ClassifierStep);

void BM_RunRecursive(benchmark::State& state) {
  RunSpec spec;
  spec.schedule.mode = state.range(0) ? ScheduleMode::mtr : ScheduleMode::open_loop;
  for (auto _ : state) benchmark::DoNotOptimize(run_recursive(spec).records.size());
}
BENCHMARK(BM_RunRecursive)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
