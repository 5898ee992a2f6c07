#pragma once

// Independent reference computations for the test suites. Everything here
// deliberately avoids the library's own FFT/operator paths: dense DFT
// matrices, naive double sums, finite differences, and brute-force solvers.

#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "msp/chain.hpp"
#include "msp/physics.hpp"
#include "msp/types.hpp"

namespace oracle {

using msp::cplx;
using msp::ComplexVector;

/// Dense N^2 x N^2 forward DFT matrix for the row-major vec convention:
/// entry at row (k*n + l), column (y*n + x) is exp(-2 pi i (k y + l x)/n).
msp::DenseComplexMatrix dense_dft_matrix(int n);

/// Conjugate transpose over n^2 (the dense inverse-DFT matrix).
msp::DenseComplexMatrix dense_idft_matrix(int n);

/// Direct double-sum forward DFT of a grid.
msp::ComplexGrid naive_dft2(const msp::ComplexGrid& g);

/// Dense propagator factor F^{-1} diag(vec h) F.
msp::DenseComplexMatrix dense_propagator(const msp::PropagatorKernel& kernel);

/// Dense full-stack factor product O_M G_{M-1} ... G_1 O_1.
msp::DenseComplexMatrix dense_stack_matrix(
    const std::vector<ComplexVector>& slice_diagonals,
    const std::vector<msp::PropagatorKernel>& kernels);

/// Central finite differences of a real-valued function over the real and
/// imaginary parts of z, packed back into complex form (d/dRe + i d/dIm).
ComplexVector finite_difference_gradient(
    const std::function<double(const ComplexVector&)>& f, ComplexVector z,
    double h = 1e-6);

/// Deterministic complex Gaussian vectors/grids for property tests.
ComplexVector random_vector(std::size_t len, std::uint64_t seed);
msp::ComplexGrid random_grid(int n, std::uint64_t seed);
msp::DenseComplexMatrix random_matrix(std::size_t rows, std::size_t cols,
                                      std::uint64_t seed);

/// Unit-modulus random slice stack diagonals.
std::vector<ComplexVector> random_unit_diagonals(int n, int slices,
                                                 std::uint64_t seed,
                                                 double phase_scale = 1.0);

double max_abs_difference(const ComplexVector& a, const ComplexVector& b);
double relative_l2_difference(const ComplexVector& a, const ComplexVector& b);

}  // namespace oracle
