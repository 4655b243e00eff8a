#include <benchmark/benchmark.h>

#include <random>

#include "nfv/models.hpp"
#include "nfv/nonlocal.hpp"
#include "nfv/scheme.hpp"

namespace {

using namespace nfv;

Field noisy(const Grid2D& g) {
  Field f(g, 1);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (double& v : f.values()) v = u(rng);
  return f;
}

void convolve(benchmark::State& state, ConvolutionMethod method) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Preset p = preset("encdec-nonsmooth");
  const Grid2D g = Grid2D::square(n, p.lo, p.hi);
  const Convolver conv(sample_kernels(p.model.kernels(), g), method);
  const Field f = noisy(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(conv(f));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.cell_count()));
}

void BM_ConvolveDirect(benchmark::State& s) { convolve(s, ConvolutionMethod::direct); }
void BM_ConvolveFast(benchmark::State& s) { convolve(s, ConvolutionMethod::fast); }

void BM_Step(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto variant = static_cast<FluxVariant>(state.range(1));
  const Preset p = preset("encdec-nonsmooth");
  const Grid2D g = Grid2D::square(n, p.lo, p.hi);
  const EncryptionProblem prob(p.model, g);
  const Field f = project_initial_data(p.profile, 1, g);
  SchemeConfig cfg;
  cfg.flux = {variant, 1.0};
  const double dt = compute_dt(cfg, g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(step(f, dt, cfg, prob.flux(), prob.convolver()));
  }
  state.SetLabel(std::string(to_string(variant)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.cell_count()));
}

}  // namespace

BENCHMARK(BM_ConvolveDirect)->RangeMultiplier(2)->Range(50, 200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvolveFast)->RangeMultiplier(2)->Range(50, 400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Step)
    ->ArgsProduct({{100, 200, 400},
                   {static_cast<int>(FluxVariant::lax_friedrichs_acg),
                    static_cast<int>(FluxVariant::upwind)}})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
