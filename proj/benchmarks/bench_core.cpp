// Microbenchmarks for the hot paths: ball scans, product-set sifting, the
// census window scan, correlation sums over SL2(Z/p), and discriminant
// factoring. Sizes are chosen so a full run stays under a minute.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "cfgeo/arith.hpp"
#include "cfgeo/quadforms.hpp"
#include "cfgeo/semigroup.hpp"
#include "cfgeo/sieve.hpp"
#include "cfgeo/sl2mod.hpp"

namespace {

using namespace cfgeo;

void BM_ball_scan(benchmark::State& state) {
  const unsigned alphabet = static_cast<unsigned>(state.range(0));
  const Int norm_sq = Int(state.range(1)) * Int(state.range(1));
  std::uint64_t points = 0;
  for (auto _ : state) {
    std::uint64_t n = 0;
    scan_ball(alphabet, norm_sq, [&](const Word&, const Mat2&) { ++n; });
    benchmark::DoNotOptimize(n);
    points = n;
  }
  state.counters["points"] = static_cast<double>(points);
}
BENCHMARK(BM_ball_scan)->Args({2, 2000})->Args({3, 700})->Args({5, 300});

void BM_product_sift(benchmark::State& state) {
  const Int bound = Int(state.range(0));
  const ProductSet pi = build_product_set(2, bound, Int(50), bound);
  for (auto _ : state) {
    SiftHistogram h = sift_sequence(pi);
    benchmark::DoNotOptimize(h.total());
  }
  state.counters["members"] = pi.size().get_d();
}
BENCHMARK(BM_product_sift)->Arg(10000)->Arg(40000);

void BM_census_scan(benchmark::State& state) {
  const std::int64_t bound = state.range(0);
  for (auto _ : state) {
    auto rows = census_rows(bound);
    benchmark::DoNotOptimize(rows.size());
  }
}
BENCHMARK(BM_census_scan)->Arg(300)->Arg(1000);

void BM_correlation(benchmark::State& state) {
  const std::uint32_t p = static_cast<std::uint32_t>(state.range(0));
  const ModMat omega = mod_reduce(word_to_matrix({1, 2}, 2), p);
  const ModMat omega2 = mod_reduce(word_to_matrix({2, 1}, 2), p);
  for (auto _ : state) {
    Rat c = fluctuation_correlation(p, omega, omega2, +1, +1);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_correlation)->Arg(13)->Arg(29);

void BM_factorize_disc(benchmark::State& state) {
  // Traces near 10^6 give discriminants near 10^12, past the trial
  // division cutoff, so this exercises the rho stage too.
  std::int64_t t = 1000003;
  for (auto _ : state) {
    FactorMultiset f = factorize(Int(t) * Int(t) - 4);
    benchmark::DoNotOptimize(f.size());
    t += 2;
  }
}
BENCHMARK(BM_factorize_disc);

void BM_pressure(benchmark::State& state) {
  const unsigned depth = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    double d = dimension_by_pressure(2, depth);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_pressure)->Arg(10)->Arg(14);

}  // namespace

BENCHMARK_MAIN();
