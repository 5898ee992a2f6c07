#pragma once

#include <span>

#include "msp/types.hpp"

namespace msp {

/// Unnormalised forward 2-D DFT:
///   out[k,l] = sum_{y,x} g[y,x] exp(-2*pi*i*(k*y + l*x)/n).
/// With this convention the operator 2-norm of the transform is exactly n.
ComplexGrid dft2_forward(const ComplexGrid& g);

/// Inverse transform carrying the 1/n^2 factor, so that
/// dft2_inverse(dft2_forward(g)) == g to machine precision.
ComplexGrid dft2_inverse(const ComplexGrid& g);

/// Span-based workers for callers that keep fields as flat n^2 vectors.
void dft2_forward_span(std::span<const cplx> in, std::span<cplx> out, int n);
void dft2_inverse_span(std::span<const cplx> in, std::span<cplx> out, int n);

}  // namespace msp
