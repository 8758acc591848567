#include <benchmark/benchmark.h>

#include "gff/constants.hpp"
#include "gff/fields.hpp"
#include "gff/greens.hpp"
#include "gff/lattice.hpp"
#include "gff/limitproc.hpp"
#include "gff/rng.hpp"

namespace {

using namespace gff;

void bm_build_lattice(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Lattice l = build_lattice(DomainSpec::unit_square(), n);
    benchmark::DoNotOptimize(l.sites.data());
  }
}
BENCHMARK(bm_build_lattice)->Arg(16)->Arg(64)->Arg(128);

void bm_green_exact(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Lattice l = build_lattice(DomainSpec::unit_square(), n);
  for (auto _ : state) {
    GreenMatrix g = green_exact(l);
    benchmark::DoNotOptimize(g.max_diag);
  }
}
BENCHMARK(bm_green_exact)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void bm_cholesky(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GreenMatrix g = green_exact(build_lattice(DomainSpec::unit_square(), n));
  for (auto _ : state) {
    CholFactor c = cholesky(g);
    benchmark::DoNotOptimize(c.L.data());
  }
}
BENCHMARK(bm_cholesky)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void bm_sample_dgff(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CholFactor c = cholesky(green_exact(build_lattice(DomainSpec::unit_square(), n)));
  std::uint64_t k = 0;
  for (auto _ : state) {
    RngStream rng = RngStream::make(7, "bench-field", k++);
    FieldSample f = sample_dgff(c, n, rng);
    benchmark::DoNotOptimize(f.h.data());
  }
}
BENCHMARK(bm_sample_dgff)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void bm_green_mc(benchmark::State& state) {
  const Lattice l = build_lattice(DomainSpec::unit_square(), 16);
  RngStream rng = RngStream::make(7, "bench-mc", 0);
  for (auto _ : state) {
    GreenMcRow row = green_mc(l, l.sites[l.size() / 2], state.range(0), rng);
    benchmark::DoNotOptimize(row.mean.data());
  }
}
BENCHMARK(bm_green_mc)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void bm_gibbs(benchmark::State& state) {
  const int n = 32;
  const CholFactor c = cholesky(green_exact(build_lattice(DomainSpec::unit_square(), n)));
  RngStream rng = RngStream::make(7, "bench-gibbs", 0);
  const FieldSample f = sample_dgff(c, n, rng);
  for (auto _ : state) {
    GibbsWeights w = gibbs(f, 2.0);
    benchmark::DoNotOptimize(w.log_z);
  }
}
BENCHMARK(bm_gibbs);

void bm_ppp_and_weights(benchmark::State& state) {
  const double beta = 2.0 * k_beta_c;
  const double level = truncation_level_for({beta}, 1e-4);
  std::uint64_t k = 0;
  for (auto _ : state) {
    RngStream rng = RngStream::make(7, "bench-ppp", k++);
    PointConfiguration cfg = sample_ppp(level, rng);
    if (cfg.xi.empty()) continue;
    std::vector<double> w = pd_weights(cfg, beta);
    benchmark::DoNotOptimize(w.data());
  }
}
BENCHMARK(bm_ppp_and_weights);

void bm_sample_q(benchmark::State& state) {
  const double beta = 2.0 * k_beta_c;
  const DecorationModel m = DecorationModel::two_site_random({0.5, 1.5}, {0.5, 0.5});
  for (auto _ : state) {
    QEstimate q = sample_Q(beta, beta, m, 2.5, 64, 7, 1, 0.01);
    benchmark::DoNotOptimize(q.mean);
  }
}
BENCHMARK(bm_sample_q)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
