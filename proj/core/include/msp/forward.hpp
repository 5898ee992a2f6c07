#pragma once

#include <vector>

#include "msp/physics.hpp"
#include "msp/specimen.hpp"
#include "msp/types.hpp"

namespace msp {

class TooLarge : public std::length_error {
public:
  explicit TooLarge(const std::string& what) : std::length_error(what) {}
};

struct ScanPlan {
  /// Integer pixel offsets (x_s, y_s), wrapped into [0, n).
  std::vector<std::array<long, 2>> positions;

  std::size_t count() const { return positions.size(); }
};

/// Full row-by-row raster of ny x nx positions with the given pixel step.
ScanPlan raster_scan(int ny, int nx, int step, int n);

using RealGrid = std::vector<double>;  // n^2 nonnegative values, row-major

struct Dataset4D {
  SamplingGeometry geom;
  ScanPlan scan;
  std::vector<RealGrid> intensities;  // one n^2 pattern per scan position
  BeamParameters beam;
  std::vector<double> distances;  // inter-slice distances used in simulation
};

/// Dense object transfer function of the whole stack, shape n^2 x n^2.
struct ScatteringMatrix {
  DenseComplexMatrix a;

  std::size_t dim() const { return a.rows; }
};

/// Fresnel kernels between consecutive slices (stack.distances entries).
std::vector<PropagatorKernel> make_stack_kernels(const SliceStack& stack,
                                                 double wavelength);

/// Real-space multislice recursion: E_1 = probe o X_1,
/// E_m = propagate(E_{m-1}) o X_m; no propagation after the final slice.
ComplexGrid multislice_exit_wave(const ComplexGrid& probe, const SliceStack& stack,
                                 std::span<const PropagatorKernel> kernels);

/// Far-field pattern |forward DFT of e|^2.
RealGrid intensity(const ComplexGrid& e);

/// Shift the probe to every scan position, run the recursion, record the
/// pattern. Scan positions are independent; `threads` > 1 fans them out.
Dataset4D simulate_dataset(const SliceStack& stack, const BeamParameters& beam,
                           const SamplingGeometry& geom, const ScanPlan& scan,
                           int threads = 1);

/// Materialise A_M column by column through the operator chain (never via
/// dense propagator factors). Guarded against accidental huge grids.
ScatteringMatrix assemble_scattering_matrix(const SliceStack& stack,
                                            const SamplingGeometry& geom,
                                            const BeamParameters& beam,
                                            bool allow_large = false);

ComplexVector apply_scattering(const ScatteringMatrix& a, std::span<const cplx> p);

/// vec of the probe shifted to each scan position (the columns of P).
std::vector<ComplexVector> resolve_probes(const ComplexGrid& probe,
                                          const ScanPlan& scan);

}  // namespace msp
