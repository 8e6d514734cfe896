#include <benchmark/benchmark.h>

#include "magtrap/param_search.hpp"

namespace {

using namespace magtrap;

// One coarse-stage slice of the d = 4 um micro-trap search.
std::vector<CandidateParams> grid(int n) {
  std::vector<CandidateParams> pts;
  const GridAxis w1{two_pi * 0.5e6, two_pi * 3e6, n}, w2{two_pi * 0.5e6, two_pi * 3e6, n};
  for (double a : w1.values())
    for (double b : w2.values())
      for (double gr = 100; gr <= 1000; gr += 150) {
        CandidateParams p{TrapLayout::multi_trap(4e-6, a, b), FieldConfig{}};
        p.field.gradient = gr;
        pts.push_back(p);
      }
  return pts;
}

void BM_Serial(benchmark::State& st) {
  const auto pts = grid(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_points_serial(pts, 0.05));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(pts.size()));
}

void BM_Parallel(benchmark::State& st) {
  const auto pts = grid(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_points_parallel(pts, 0.05));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(pts.size()));
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
