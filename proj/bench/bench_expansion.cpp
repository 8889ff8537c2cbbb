// Serial vs OpenMP evaluation of the expansion coefficients on a fixed
// random configuration. Run with OMP_NUM_THREADS to vary the thread count.
#include <benchmark/benchmark.h>

#include "lightcone/mass2.hpp"
#include "lightcone/random_fields.hpp"
#include "lightcone/texp.hpp"

namespace {

using namespace lce;

struct Fixture {
  ChiralConfig cfg;
  ChiralConfig no_potential;
  FourVector x, y;

  explicit Fixture(int n) {
    Rng rng(12345);
    RandomConfigOptions o;
    o.n = n;
    cfg = random_config(rng, o);
    RandomConfigOptions o2 = o;
    o2.potentials = false;
    no_potential = random_config(rng, o2);
    x = {-0.3, 0.1, 0.0, 0.05};
    y = {0.6, 0.2, -0.1, 0.1};
  }
};

const Fixture& fixture(int n) {
  static const Fixture f1(1), f2(2), f3(3);
  return n == 1 ? f1 : (n == 2 ? f2 : f3);
}

QuadratureSpec spec_for(bool parallel) {
  QuadratureSpec s;
  s.parallel = parallel;
  return s;
}

void BM_ChiralExpansion(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  const QuadratureSpec spec = spec_for(state.range(1) != 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chiral_expansion(f.cfg, f.x, f.y, Side::L, KernelFamily::p, spec));
  }
}

void BM_Mass2Expansion(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  const QuadratureSpec spec = spec_for(state.range(1) != 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mass2_expansion(f.no_potential, f.x, f.y, Side::L, KernelFamily::p, spec));
  }
}

void BM_DysonTerm(benchmark::State& state) {
  const Fixture& f = fixture(3);
  const QuadratureSpec spec = spec_for(state.range(1) != 0);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dyson_term(f.cfg.A_L, f.x, f.y, order, spec, -kI));
  }
}

void BM_Hermiticity(benchmark::State& state) {
  const Fixture& f = fixture(2);
  const QuadratureSpec spec = spec_for(state.range(0) != 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hermiticity_defect(f.cfg, f.x, f.y, spec));
  }
}

}  // namespace

// Second argument: 0 = serial, 1 = OpenMP.
BENCHMARK(BM_ChiralExpansion)->ArgsProduct({{1, 2, 3}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Mass2Expansion)->ArgsProduct({{1, 2, 3}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DysonTerm)->ArgsProduct({{2, 3, 4}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Hermiticity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
