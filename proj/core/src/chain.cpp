#include "msp/chain.hpp"

#include <algorithm>
#include <cmath>

namespace msp {

double DiagonalOperator::max_abs() const {
  double m = 0.0;
  for (const cplx& z : diag) m = std::max(m, std::abs(z));
  return m;
}

void ChainOperator::push_diagonal(ComplexVector diag) {
  if (diag.size() != dim_)
    throw DimensionMismatch("ChainOperator: diagonal length does not match dim");
  factors_.push_back(Factor{std::move(diag), nullptr});
}

void ChainOperator::push_propagator(const PropagatorKernel& kernel) {
  if (kernel.h.size() != dim_)
    throw DimensionMismatch("ChainOperator: kernel size does not match dim");
  factors_.push_back(Factor{{}, &kernel});
}

void ChainOperator::apply(std::span<const cplx> in, std::span<cplx> out) const {
  if (in.size() != dim_ || out.size() != dim_)
    throw DimensionMismatch("ChainOperator::apply: vector length mismatch");
  std::copy(in.begin(), in.end(), out.begin());
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
    if (it->kernel) {
      propagate_span(out, out, *it->kernel);
    } else {
      for (std::size_t i = 0; i < dim_; ++i) out[i] *= it->diag[i];
    }
  }
}

void ChainOperator::apply_adjoint(std::span<const cplx> in,
                                  std::span<cplx> out) const {
  if (in.size() != dim_ || out.size() != dim_)
    throw DimensionMismatch("ChainOperator::apply_adjoint: vector length mismatch");
  std::copy(in.begin(), in.end(), out.begin());
  for (const Factor& f : factors_) {
    if (f.kernel) {
      propagate_span(out, out, *f.kernel, /*adjoint=*/true);
    } else {
      for (std::size_t i = 0; i < dim_; ++i) out[i] *= std::conj(f.diag[i]);
    }
  }
}

double ChainOperator::norm_bound() const {
  double bound = 1.0;
  for (const Factor& f : factors_) {
    if (f.kernel) continue;
    double m = 0.0;
    for (const cplx& z : f.diag) m = std::max(m, std::abs(z));
    bound *= m;
  }
  return bound;
}

LinearOperator ChainOperator::as_linear_operator() const {
  LinearOperator op;
  op.rows = dim_;
  op.cols = dim_;
  op.apply = [this](std::span<const cplx> in, std::span<cplx> out) {
    apply(in, out);
  };
  op.apply_adjoint = [this](std::span<const cplx> in, std::span<cplx> out) {
    apply_adjoint(in, out);
  };
  return op;
}

std::pair<ChainOperator, ChainOperator> prefix_suffix(
    std::span<const DiagonalOperator> slices,
    std::span<const PropagatorKernel> kernels, int ell) {
  const int m = static_cast<int>(slices.size());
  if (ell < 1 || ell > m)
    throw IndexOutOfRange("prefix_suffix: slice index out of range");
  if (kernels.size() + 1 < slices.size())
    throw DimensionMismatch("prefix_suffix: not enough propagator kernels");
  const std::size_t dim = slices.empty() ? 0 : slices[0].diag.size();

  ChainOperator prefix(dim);
  for (int j = m; j > ell; --j) {
    prefix.push_diagonal(slices[j - 1].diag);
    prefix.push_propagator(kernels[j - 2]);
  }
  ChainOperator suffix(dim);
  for (int j = ell - 1; j >= 1; --j) {
    suffix.push_propagator(kernels[j - 1]);
    suffix.push_diagonal(slices[j - 1].diag);
  }
  return {std::move(prefix), std::move(suffix)};
}

ChainOperator full_chain(std::span<const DiagonalOperator> slices,
                         std::span<const PropagatorKernel> kernels) {
  if (slices.empty())
    throw std::invalid_argument("full_chain: empty slice list");
  if (kernels.size() + 1 < slices.size())
    throw DimensionMismatch("full_chain: not enough propagator kernels");
  const std::size_t dim = slices[0].diag.size();
  ChainOperator chain(dim);
  const int m = static_cast<int>(slices.size());
  for (int j = m; j >= 1; --j) {
    chain.push_diagonal(slices[j - 1].diag);
    if (j > 1) chain.push_propagator(kernels[j - 2]);
  }
  return chain;
}

ScatteringMatrix materialise(const ChainOperator& chain) {
  const std::size_t dim = chain.dim();
  ScatteringMatrix a;
  a.a = DenseComplexMatrix(dim, dim);
  ComplexVector basis(dim);
  ComplexVector column(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    std::fill(basis.begin(), basis.end(), cplx{});
    basis[j] = 1.0;
    chain.apply(basis, column);
    for (std::size_t i = 0; i < dim; ++i) a.a.at(i, j) = column[i];
  }
  return a;
}

}  // namespace msp
