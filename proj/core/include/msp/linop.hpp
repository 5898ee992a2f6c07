#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "msp/types.hpp"

namespace msp {

/// Matrix-free linear operator given by a consistent apply / adjoint pair.
struct LinearOperator {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::function<void(std::span<const cplx>, std::span<cplx>)> apply;
  std::function<void(std::span<const cplx>, std::span<cplx>)> apply_adjoint;

  ComplexVector operator()(std::span<const cplx> v) const {
    ComplexVector out(rows);
    apply(v, out);
    return out;
  }
  ComplexVector adjoint(std::span<const cplx> v) const {
    ComplexVector out(cols);
    apply_adjoint(v, out);
    return out;
  }
};

LinearOperator dense_operator(const DenseComplexMatrix& m);

struct SpectralNormResult {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Start vectors come from this fixed seed so every learning rate derived
// from a spectral norm is reproducible run-to-run.
inline constexpr std::uint64_t kPowerIterationSeed = 0x9e3779b97f4a7c15ull;

/// Largest singular value via power iteration on the normal operator
/// op^H op. Returns the best estimate with converged=false when the
/// iteration budget runs out before the relative tolerance is met.
SpectralNormResult spectral_norm(const LinearOperator& op, int max_iters = 200,
                                 double tol = 1e-9);

}  // namespace msp
