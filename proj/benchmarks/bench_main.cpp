#include <benchmark/benchmark.h>

#include <optional>
#include <vector>

#include "fuzex/constraints.hpp"
#include "fuzex/controller.hpp"
#include "fuzex/dataset.hpp"
#include "fuzex/expr.hpp"
#include "fuzex/library.hpp"
#include "fuzex/pareto.hpp"
#include "fuzex/rng.hpp"
#include "fuzex/trainer.hpp"

namespace {

fuzex::Library bench_library() {
  return fuzex::build_library(fuzex::LibraryMode::single, fuzex::Semantics::lukasiewicz,
                              {"NBD", "OBD", "MD7", "C_O", "TF"});
}

// Columnar evaluation of a 10-node expression over growing row counts.
void BM_EvaluateColumns(benchmark::State& state) {
  const fuzex::Library lib = bench_library();
  const fuzex::ExprTree tree =
      fuzex::parse("and_lk(NBD, and_lk(not(or_lk(OBD, OBD)), or_lk(MD7, TF)))", lib);
  const std::size_t rows = static_cast<std::size_t>(state.range());
  fuzex::Rng rng(1);
  std::vector<std::vector<fuzex::FuzzyValue>> cols(
      5, std::vector<fuzex::FuzzyValue>(rows));
  for (auto& col : cols) {
    for (auto& v : col) v = fuzex::FuzzyValue(rng.next_double());
  }
  std::vector<const std::vector<fuzex::FuzzyValue>*> ptrs;
  for (const auto& col : cols) ptrs.push_back(&col);

  for (auto _ : state) {
    auto out = fuzex::evaluate_columns(tree, ptrs);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}
BENCHMARK(BM_EvaluateColumns)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);

void BM_SampleTraversal(benchmark::State& state) {
  const fuzex::Library lib = bench_library();
  const fuzex::ConstraintConfig cfg{32, 4, false};
  fuzex::Controller controller(lib.size(), static_cast<int>(state.range()), 7);
  fuzex::Rng rng(13);
  for (auto _ : state) {
    auto traj = controller.sample(lib, cfg, rng);
    benchmark::DoNotOptimize(traj);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleTraversal)->Arg(16)->Arg(32)->Arg(64);

void BM_GradientStep(benchmark::State& state) {
  const fuzex::Library lib = bench_library();
  const fuzex::ConstraintConfig cfg{32, 4, false};
  fuzex::Controller controller(lib.size(), 32, 7);
  fuzex::Rng rng(13);
  const std::size_t batch = static_cast<std::size_t>(state.range());
  std::vector<fuzex::Trajectory> trajectories;
  std::vector<double> advantages(batch, 0.1);
  for (std::size_t i = 0; i < batch; ++i) {
    trajectories.push_back(controller.sample(lib, cfg, rng));
  }
  for (auto _ : state) {
    controller.gradient_step(trajectories, advantages, lib, cfg, 1e-4, 5e-3);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_GradientStep)->Arg(8)->Arg(25)->Arg(64);

void BM_ParetoFront(benchmark::State& state) {
  fuzex::Rng rng(99);
  const std::size_t n = static_cast<std::size_t>(state.range());
  std::vector<fuzex::ParetoPoint> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    points.push_back(fuzex::ParetoPoint{1 + rng.next_int(40), rng.next_double(),
                                        "e" + std::to_string(i)});
  }
  for (auto _ : state) {
    auto front = fuzex::pareto_front(points);
    benchmark::DoNotOptimize(front);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ParetoFront)->RangeMultiplier(8)->Range(64, 1 << 15);

}  // namespace

BENCHMARK_MAIN();
