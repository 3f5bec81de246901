#include <random>

#include <benchmark/benchmark.h>

#include "pseudospec/encode.h"
#include "pseudospec/geometry.h"
#include "pseudospec/quadratize.h"
#include "pseudospec/search.h"

namespace ps = pseudospec;

static void BM_Eigh(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  ps::SymMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.set(i, j, g(rng));
  for (auto _ : state) benchmark::DoNotOptimize(ps::eigh(m));
}
BENCHMARK(BM_Eigh)->Arg(3)->Arg(10)->Arg(40);

static void BM_EnumerateExample2(benchmark::State& state) {
  const ps::MatrixPencil pencil = ps::example2_pencil();
  ps::EnumerateOptions opts;
  opts.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ps::enumerate_rank_one(pencil, {{-2, 2}, {-2, 2}, {-2, 2}}, opts));
  }
}
BENCHMARK(BM_EnumerateExample2)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

static void BM_HullMembership(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ps::Point> pts(static_cast<std::size_t>(state.range(0)));
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  const ps::Point x = {0.1, -0.05, 0.02};
  for (auto _ : state) benchmark::DoNotOptimize(ps::hull_membership(x, pts, 1e-9));
}
BENCHMARK(BM_HullMembership)->Arg(50)->Arg(200)->Arg(1000);

static void BM_Quadratize(benchmark::State& state) {
  const ps::PolySystem sys = ps::make_system(
      {"x", "y", "z"}, {{"x^5*y - 3*z^4 + x*y*z^2 - 1", ps::Relation::kEq},
                        {"y^3*z^2 + x^2 - 2", ps::Relation::kGe}});
  for (auto _ : state) benchmark::DoNotOptimize(ps::quadratize(sys));
}
BENCHMARK(BM_Quadratize);

static void BM_EncodeStrict(benchmark::State& state) {
  const ps::QuadSystem q = ps::quadratize(ps::make_system(
      {"x", "y", "z"}, {{"x^5*y - 3*z^4 + x*y*z^2 - 1", ps::Relation::kEq},
                        {"y^3*z^2 + x^2 - 2", ps::Relation::kGt}}));
  for (auto _ : state) benchmark::DoNotOptimize(ps::encode_strict(q));
}
BENCHMARK(BM_EncodeStrict);
BENCHMARK_MAIN();
