#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "qlab/algorithms.hpp"
#include "qlab/boolfn.hpp"
#include "qlab/certificates.hpp"
#include "qlab/distributions.hpp"
#include "qlab/dtree.hpp"
#include "qlab/lp.hpp"
#include "qlab/rng.hpp"
#include "qlab/solvers.hpp"

namespace {

using namespace qlab;

void BM_SliceMass(benchmark::State& state) {
  int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Rat p = conj_prob_slice(3, 2, m, m / 2);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_SliceMass)->Arg(16)->Arg(64)->Arg(256);

void BM_NoisyOrTrial(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  NoiseModel noise =
      NoiseModel::two_sided(std::vector<Rat>(static_cast<size_t>(n), make_rat(1, 3)));
  Bits input(static_cast<size_t>(n), 0);
  input[static_cast<size_t>(n) / 2] = 1;
  std::uint64_t trial = 0;
  for (auto _ : state) {
    Rng g = Rng::for_trial(1234, trial++);
    InputOracle oracle(input, noise, g);
    auto out = noisy_or(n, oracle);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_NoisyOrTrial)->Arg(50)->Arg(200);

void BM_MatrixGame(benchmark::State& state) {
  int k = static_cast<int>(state.range(0));
  std::vector<std::vector<Rat>> payoff(static_cast<size_t>(k),
                                       std::vector<Rat>(static_cast<size_t>(k)));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      payoff[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          make_rat((i * 7 + j * 3) % 5 - 2, 1 + (i + j) % 3);
  for (auto _ : state) {
    auto sol = solve_matrix_game(payoff);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(BM_MatrixGame)->Arg(4)->Arg(8)->Arg(12);

void BM_MajCaseAnalysis(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Conjunction conj({0, n + 1}, {2 * n + 2});
  for (auto _ : state) {
    auto rep = maj_case_analysis(n, n, conj);
    benchmark::DoNotOptimize(rep);
  }
}
BENCHMARK(BM_MajCaseAnalysis)->Arg(8)->Arg(16)->Arg(32);

void BM_QueryGame(benchmark::State& state) {
  PartialFunction f = catalog("gapmaj", 3);
  for (auto _ : state) {
    auto res = solve_query_game(f, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_QueryGame)->Arg(1)->Arg(2);

}  // namespace

BENCHMARK_MAIN();
