#include <benchmark/benchmark.h>

#include "pmsem/promptgen.hpp"
#include "pmsem/random.hpp"
#include "pmsem/synth.hpp"
#include "pmsem/taskgen.hpp"

using namespace pmsem;

namespace {

const std::vector<AdmittedModel>& corpus() {
  static const auto models = validate_corpus(synth_corpus({.n_models = 200}, 1)).admitted;
  return models;
}

void BM_GenTsad(benchmark::State& state) {
  for (auto _ : state) {
    for (const auto& m : corpus()) benchmark::DoNotOptimize(gen_tsad(m.model, derive_seed(1, m.model.id())));
  }
}
BENCHMARK(BM_GenTsad)->Unit(benchmark::kMillisecond);

void BM_GenAsadSnap(benchmark::State& state) {
  for (auto _ : state) {
    for (const auto& m : corpus()) {
      benchmark::DoNotOptimize(gen_asad(m.model, derive_seed(1, m.model.id())));
      benchmark::DoNotOptimize(gen_snap(m.model));
    }
  }
}
BENCHMARK(BM_GenAsadSnap)->Unit(benchmark::kMillisecond);

void BM_Split(benchmark::State& state) {
  std::vector<ProcessModel> models;
  for (const auto& m : corpus()) models.push_back(m.model);
  for (auto _ : state) benchmark::DoNotOptimize(split_corpus(models, {}, 1));
}
BENCHMARK(BM_Split)->Unit(benchmark::kMillisecond);

void BM_RenderIcl(benchmark::State& state) {
  std::vector<TaskRecord> records;
  for (const auto& m : corpus()) {
    for (auto& r : gen_tsad(m.model, derive_seed(1, m.model.id()))) records.push_back(std::move(r));
  }
  const ShotPool pool(Task::TSAD, records);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_icl(Task::TSAD, records[i % records.size()], pool, 6, 1));
    ++i;
  }
}
BENCHMARK(BM_RenderIcl);

}  // namespace

BENCHMARK_MAIN();
