#include <benchmark/benchmark.h>

#include <random>

#include "msp/dft.hpp"
#include "msp/forward.hpp"
#include "msp/solvers.hpp"

namespace {

constexpr double nm = 1e-9;

msp::ComplexGrid random_grid(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  msp::ComplexVector data(static_cast<std::size_t>(n) * n);
  for (msp::cplx& z : data) z = msp::cplx(gauss(rng), gauss(rng));
  return msp::ComplexGrid(n, std::move(data));
}

void BM_Dft2Forward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const msp::ComplexGrid g = random_grid(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(msp::dft2_forward(g));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Dft2Forward)->Arg(16)->Arg(64)->Arg(256);

void BM_MultisliceExitWave(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const msp::SamplingGeometry geom{n, 0.05 * nm};
  const msp::BeamParameters beam = msp::make_beam(200e3, 32e-3);
  const msp::SliceStack stack = msp::random_phantom(geom, 6, 0.2, 2, 2.0 * nm);
  const auto kernels = msp::make_stack_kernels(stack, beam.wavelength);
  const msp::ComplexGrid probe = msp::make_probe(beam, geom);
  for (auto _ : state)
    benchmark::DoNotOptimize(msp::multislice_exit_wave(probe, stack, kernels));
}
BENCHMARK(BM_MultisliceExitWave)->Arg(16)->Arg(64)->Arg(128);

void BM_SimulateDataset(benchmark::State& state) {
  const int n = 32;
  const msp::SamplingGeometry geom{n, 0.05 * nm};
  const msp::BeamParameters beam = msp::make_beam(200e3, 32e-3);
  const msp::SliceStack stack = msp::random_phantom(geom, 3, 0.2, 3, 2.0 * nm);
  const msp::ScanPlan scan = msp::raster_scan(8, 8, 2, n);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        msp::simulate_dataset(stack, beam, geom, scan, threads));
}
BENCHMARK(BM_SimulateDataset)->Arg(1)->Arg(4);

void BM_AssembleScatteringMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const msp::SamplingGeometry geom{n, 0.05 * nm};
  const msp::BeamParameters beam = msp::make_beam(200e3, 32e-3);
  const msp::SliceStack stack = msp::random_phantom(geom, 3, 0.2, 4, 2.0 * nm);
  for (auto _ : state)
    benchmark::DoNotOptimize(msp::assemble_scattering_matrix(stack, geom, beam));
}
BENCHMARK(BM_AssembleScatteringMatrix)->Arg(8)->Arg(16);

void BM_LayerwiseIteration(benchmark::State& state) {
  const int n = 8;
  const msp::SamplingGeometry geom{n, 0.05 * nm};
  const msp::BeamParameters beam = msp::make_beam(200e3, 32e-3);
  const msp::SliceStack stack = msp::random_phantom(geom, 2, 0.2, 5, 2.0 * nm);
  const msp::ScanPlan scan = msp::raster_scan(4, 4, 2, n);
  const msp::Dataset4D data = msp::simulate_dataset(stack, beam, geom, scan);
  const auto probes = msp::resolve_probes(msp::make_probe(beam, geom), scan);
  const auto kernels = msp::make_stack_kernels(stack, beam.wavelength);
  msp::SolverConfig cfg;
  cfg.outer_iters = 1;
  cfg.inner_gradient_steps = 10;
  cfg.stop_tol = 0.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(msp::layerwise_reconstruct(
        data, probes, kernels, msp::identity_init(n, 2), cfg));
}
BENCHMARK(BM_LayerwiseIteration);

void BM_SparseIteration(benchmark::State& state) {
  const int n = 8;
  const msp::SamplingGeometry geom{n, 0.05 * nm};
  const msp::BeamParameters beam = msp::make_beam(200e3, 32e-3);
  const msp::SliceStack stack = msp::random_phantom(geom, 2, 0.2, 6, 2.0 * nm);
  const msp::ScanPlan scan = msp::raster_scan(4, 4, 2, n);
  const msp::Dataset4D data = msp::simulate_dataset(stack, beam, geom, scan);
  const auto probes = msp::resolve_probes(msp::make_probe(beam, geom), scan);
  const auto kernels = msp::make_stack_kernels(stack, beam.wavelength);
  msp::SolverConfig cfg;
  cfg.outer_iters = 1;
  cfg.inner_gradient_steps = 10;
  cfg.stop_tol = 0.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(msp::sparse_matrix_decomposition(
        data, probes, kernels, msp::identity_init(n, 2), cfg));
}
BENCHMARK(BM_SparseIteration);

}  // namespace

BENCHMARK_MAIN();
