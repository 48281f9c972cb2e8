#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "pmsem/eval.hpp"
#include "pmsem/semantics.hpp"
#include "pmsem/tree_dsl.hpp"

using namespace pmsem;

namespace {

// +(l0, ..., l{n-1}): n! sequences.
ProcessTree parallel_tree(std::size_t n) {
  std::vector<ProcessTree> leaves;
  for (std::size_t i = 0; i < n; ++i) leaves.push_back(ProcessTree::leaf("l" + std::to_string(i)));
  return ProcessTree::node(Operator::And, std::move(leaves));
}

void BM_PlayoutParallel(benchmark::State& state) {
  const ProcessTree t = parallel_tree(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(play_language(t));
}
BENCHMARK(BM_PlayoutParallel)->DenseRange(3, 7);

void BM_PlayoutLoop(benchmark::State& state) {
  const ProcessTree t = parse_tree(
      "*(->('a', X('b', 'c'), +('d', 'e')), ->('f', 'g'), 'h')");
  for (auto _ : state) benchmark::DoNotOptimize(play_language(t));
}
BENCHMARK(BM_PlayoutLoop);

void BM_Relations(benchmark::State& state) {
  const ProcessModel m = playout(parallel_tree(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(footprint(dfg_of_model(m)));
    benchmark::DoNotOptimize(eventually_follows(m));
  }
}
BENCHMARK(BM_Relations)->DenseRange(4, 7);

void BM_ParseRender(benchmark::State& state) {
  const std::string text =
      "->('receive order', X(->('accept order', 'deliver package'), 'reject order'), "
      "+('bill', *('check stock', 'reorder')), X('ship', tau))";
  for (auto _ : state) benchmark::DoNotOptimize(render_tree(parse_tree(text)));
}
BENCHMARK(BM_ParseRender);

void BM_FootprintFitness(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  ActivitySet acts;
  for (std::size_t i = 0; i < n; ++i) acts.insert(Activity("a" + std::to_string(i)));
  const Footprint gold = random_footprint_baseline(acts, 1);
  const Footprint pred = random_footprint_baseline(acts, 2);
  for (auto _ : state) benchmark::DoNotOptimize(footprint_fitness(gold, pred));
}
BENCHMARK(BM_FootprintFitness)->Arg(4)->Arg(21);

}  // namespace
