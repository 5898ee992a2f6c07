#include "msp/forward.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "msp/dft.hpp"

namespace msp {

ScanPlan raster_scan(int ny, int nx, int step, int n) {
  if (ny < 1 || nx < 1 || step < 1)
    throw std::invalid_argument("raster_scan: dimensions and step must be >= 1");
  ScanPlan scan;
  scan.positions.reserve(static_cast<std::size_t>(ny) * nx);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      scan.positions.push_back(
          {wrap_index(static_cast<long>(ix) * step, n),
           wrap_index(static_cast<long>(iy) * step, n)});
  return scan;
}

std::vector<PropagatorKernel> make_stack_kernels(const SliceStack& stack,
                                                 double wavelength) {
  const std::size_t gaps =
      stack.slices.empty() ? 0 : stack.slices.size() - 1;
  if (stack.distances.size() < gaps)
    throw DimensionMismatch("make_stack_kernels: missing inter-slice distances");
  std::vector<PropagatorKernel> kernels;
  kernels.reserve(gaps);
  for (std::size_t i = 0; i < gaps; ++i)
    kernels.push_back(make_propagator(stack.geom, wavelength, stack.distances[i]));
  return kernels;
}

ComplexGrid multislice_exit_wave(const ComplexGrid& probe, const SliceStack& stack,
                                 std::span<const PropagatorKernel> kernels) {
  if (stack.slices.empty())
    throw std::invalid_argument("multislice_exit_wave: empty slice stack");
  if (probe.n() != stack.slices.front().n())
    throw DimensionMismatch("multislice_exit_wave: probe and stack sizes differ");
  if (kernels.size() + 1 < stack.slices.size())
    throw DimensionMismatch("multislice_exit_wave: not enough propagator kernels");

  ComplexGrid e(probe.n(), hadamard_as_diag(probe, stack.slices[0]));
  for (std::size_t m = 1; m < stack.slices.size(); ++m) {
    ComplexGrid propagated = propagate(e, kernels[m - 1]);
    e = ComplexGrid(probe.n(), hadamard_as_diag(propagated, stack.slices[m]));
  }
  return e;
}

RealGrid intensity(const ComplexGrid& e) {
  ComplexGrid spectrum = dft2_forward(e);
  RealGrid out(spectrum.size());
  auto s = spectrum.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(s[i]);
  return out;
}

namespace {

void for_each_index(std::size_t count, int threads,
                    const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = std::min<std::size_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace

Dataset4D simulate_dataset(const SliceStack& stack, const BeamParameters& beam,
                           const SamplingGeometry& geom, const ScanPlan& scan,
                           int threads) {
  if (stack.geom.n != geom.n)
    throw DimensionMismatch("simulate_dataset: stack and geometry sizes differ");
  if (scan.positions.empty())
    throw std::invalid_argument("simulate_dataset: empty scan plan");

  Dataset4D data;
  data.geom = geom;
  data.scan = scan;
  data.beam = beam;
  data.distances = stack.distances;
  data.intensities.resize(scan.count());

  const ComplexGrid probe = make_probe(beam, geom);
  const std::vector<PropagatorKernel> kernels =
      make_stack_kernels(stack, beam.wavelength);

  for_each_index(scan.count(), threads, [&](std::size_t s) {
    const auto [xs, ys] = scan.positions[s];
    const ComplexGrid shifted = shift_probe(probe, xs, ys);
    data.intensities[s] = intensity(multislice_exit_wave(shifted, stack, kernels));
  });
  return data;
}

ScatteringMatrix assemble_scattering_matrix(const SliceStack& stack,
                                            const SamplingGeometry& geom,
                                            const BeamParameters& beam,
                                            bool allow_large) {
  if (geom.n > 64 && !allow_large)
    throw TooLarge(
        "assemble_scattering_matrix: n > 64 materialises more than 16M complex "
        "entries; pass allow_large to override");
  const std::size_t dim = static_cast<std::size_t>(geom.n) * geom.n;
  const std::vector<PropagatorKernel> kernels =
      make_stack_kernels(stack, beam.wavelength);

  ScatteringMatrix a;
  a.a = DenseComplexMatrix(dim, dim);
  ComplexVector basis(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    basis.assign(dim, cplx{});
    basis[j] = 1.0;
    const ComplexGrid column = multislice_exit_wave(
        ComplexGrid(geom.n, basis), stack, kernels);
    auto col = column.data();
    for (std::size_t i = 0; i < dim; ++i) a.a.at(i, j) = col[i];
  }
  return a;
}

ComplexVector apply_scattering(const ScatteringMatrix& a, std::span<const cplx> p) {
  return matvec(a.a, p);
}

std::vector<ComplexVector> resolve_probes(const ComplexGrid& probe,
                                          const ScanPlan& scan) {
  std::vector<ComplexVector> probes;
  probes.reserve(scan.count());
  for (const auto& [xs, ys] : scan.positions)
    probes.push_back(vectorise(shift_probe(probe, xs, ys)));
  return probes;
}

}  // namespace msp
