#include "msp/types.hpp"

#include <cmath>

namespace msp {

ComplexVector vectorise(const ComplexGrid& g) {
  return ComplexVector(g.data().begin(), g.data().end());
}

ComplexGrid grid_from_vector(int n, std::span<const cplx> v) {
  if (v.size() != static_cast<std::size_t>(n) * n)
    throw DimensionMismatch("grid_from_vector: length does not equal n^2");
  return ComplexGrid(n, ComplexVector(v.begin(), v.end()));
}

ComplexVector hadamard_as_diag(const ComplexGrid& a, const ComplexGrid& b) {
  if (a.n() != b.n())
    throw DimensionMismatch("hadamard_as_diag: grids differ in side length");
  ComplexVector out(a.size());
  auto av = a.data();
  auto bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return out;
}

double l2_norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& z : v) s += std::norm(z);
  return std::sqrt(s);
}

double l2_norm_real(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

cplx inner_product(std::span<const cplx> u, std::span<const cplx> v) {
  if (u.size() != v.size())
    throw DimensionMismatch("inner_product: length mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

ComplexVector matvec(const DenseComplexMatrix& m, std::span<const cplx> v) {
  if (v.size() != m.cols)
    throw DimensionMismatch("matvec: vector length does not match matrix columns");
  ComplexVector out(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    cplx s = 0.0;
    const cplx* row = m.data.data() + i * m.cols;
    for (std::size_t j = 0; j < m.cols; ++j) s += row[j] * v[j];
    out[i] = s;
  }
  return out;
}

ComplexVector matvec_adjoint(const DenseComplexMatrix& m, std::span<const cplx> v) {
  if (v.size() != m.rows)
    throw DimensionMismatch("matvec_adjoint: vector length does not match matrix rows");
  ComplexVector out(m.cols);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const cplx* row = m.data.data() + i * m.cols;
    const cplx vi = v[i];
    for (std::size_t j = 0; j < m.cols; ++j) out[j] += std::conj(row[j]) * vi;
  }
  return out;
}

DenseComplexMatrix matmul(const DenseComplexMatrix& a, const DenseComplexMatrix& b) {
  if (a.cols != b.rows)
    throw DimensionMismatch("matmul: inner dimensions differ");
  DenseComplexMatrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const cplx aik = a.at(i, k);
      if (aik == cplx{}) continue;
      const cplx* brow = b.data.data() + k * b.cols;
      cplx* crow = c.data.data() + i * c.cols;
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

cplx trace_adjoint_product(const DenseComplexMatrix& a, const DenseComplexMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw DimensionMismatch("trace_adjoint_product: shape mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) s += std::conj(a.data[i]) * b.data[i];
  return s;
}

double frobenius_norm(const DenseComplexMatrix& m) {
  double s = 0.0;
  for (const cplx& z : m.data) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace msp
