#pragma once

#include <vector>

#include "msp/forward.hpp"
#include "msp/linop.hpp"
#include "msp/physics.hpp"
#include "msp/types.hpp"

namespace msp {

struct DiagonalOperator {
  ComplexVector diag;  // length n^2; application is elementwise multiply

  double max_abs() const;
};

/// Product of diagonal slices and Fresnel propagators, applied matrix-free.
/// Factors are listed left-to-right as the product is written, so apply()
/// multiplies by the rightmost factor first. Diagonals are stored by value;
/// kernels are borrowed and must outlive the chain.
class ChainOperator {
public:
  struct Factor {
    ComplexVector diag;                     // used when kernel == nullptr
    const PropagatorKernel* kernel = nullptr;
  };

  explicit ChainOperator(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  void push_diagonal(ComplexVector diag);
  void push_propagator(const PropagatorKernel& kernel);

  void apply(std::span<const cplx> in, std::span<cplx> out) const;
  void apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const;

  ComplexVector operator()(std::span<const cplx> v) const {
    ComplexVector out(dim_);
    apply(v, out);
    return out;
  }
  ComplexVector adjoint(std::span<const cplx> v) const {
    ComplexVector out(dim_);
    apply_adjoint(v, out);
    return out;
  }

  /// Upper bound on the spectral norm: product of max |diag entry| over the
  /// diagonal factors (every propagator is unitary).
  double norm_bound() const;

  /// View as a generic operator; the chain must outlive the result.
  LinearOperator as_linear_operator() const;

private:
  std::size_t dim_;
  std::vector<Factor> factors_;
};

/// Prefix R_l = O_M G_{M-1} ... O_{l+1} G_l and suffix
/// S_l = G_{l-1} O_{l-1} ... G_1 O_1, so that R_l O_l S_l is the full stack
/// operator. l is 1-based; R_M and S_1 are empty products (identity).
/// kernels[i] is the propagator between slices i+1 and i+2.
std::pair<ChainOperator, ChainOperator> prefix_suffix(
    std::span<const DiagonalOperator> slices,
    std::span<const PropagatorKernel> kernels, int ell);

/// The whole-stack operator O_M G_{M-1} ... G_1 O_1.
ChainOperator full_chain(std::span<const DiagonalOperator> slices,
                         std::span<const PropagatorKernel> kernels);

/// Materialise a chain column by column into a dense scattering matrix.
ScatteringMatrix materialise(const ChainOperator& chain);

}  // namespace msp
