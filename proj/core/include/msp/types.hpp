#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace msp {

using cplx = std::complex<double>;
using ComplexVector = std::vector<cplx>;

class DimensionMismatch : public std::invalid_argument {
public:
  explicit DimensionMismatch(const std::string& what)
      : std::invalid_argument(what) {}
};

class IndexOutOfRange : public std::out_of_range {
public:
  explicit IndexOutOfRange(const std::string& what)
      : std::out_of_range(what) {}
};

/// Wraps an arbitrary integer index into [0, n).
inline long wrap_index(long k, int n) {
  long w = k % n;
  return w < 0 ? w + n : w;
}

/// Signed wrapped offset in (-n/2, n/2]; index 0 maps to offset 0.
inline long signed_offset(long k, int n) {
  long w = wrap_index(k, n);
  return w <= n / 2 ? w : w - n;
}

/// Square complex field with cyclic index semantics. Row-major storage,
/// entry (y, x) lives at data[y * n + x] after wrapping both indices.
class ComplexGrid {
public:
  ComplexGrid() = default;

  explicit ComplexGrid(int n) : n_(n), data_(static_cast<std::size_t>(n) * n) {
    if (n <= 0) throw DimensionMismatch("ComplexGrid: side length must be positive");
  }

  ComplexGrid(int n, ComplexVector data) : n_(n), data_(std::move(data)) {
    if (n <= 0) throw DimensionMismatch("ComplexGrid: side length must be positive");
    if (data_.size() != static_cast<std::size_t>(n) * n)
      throw DimensionMismatch("ComplexGrid: data length does not equal n^2");
  }

  int n() const { return n_; }
  std::size_t size() const { return data_.size(); }

  cplx& operator()(long y, long x) {
    return data_[static_cast<std::size_t>(wrap_index(y, n_)) * n_ + wrap_index(x, n_)];
  }
  const cplx& operator()(long y, long x) const {
    return data_[static_cast<std::size_t>(wrap_index(y, n_)) * n_ + wrap_index(x, n_)];
  }

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }
  ComplexVector& storage() { return data_; }
  const ComplexVector& storage() const { return data_; }

private:
  int n_ = 0;
  ComplexVector data_;
};

/// Row-major dense complex matrix; only materialised at desk scale.
struct DenseComplexMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  ComplexVector data;

  DenseComplexMatrix() = default;
  DenseComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  cplx& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const cplx& at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  static DenseComplexMatrix identity(std::size_t n) {
    DenseComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }
};

ComplexVector vectorise(const ComplexGrid& g);
ComplexGrid grid_from_vector(int n, std::span<const cplx> v);

/// vec(a o b): the elementwise product as a vector, equal to
/// diag(vec a) * vec b and diag(vec b) * vec a.
ComplexVector hadamard_as_diag(const ComplexGrid& a, const ComplexGrid& b);

double l2_norm(std::span<const cplx> v);
double l2_norm_real(std::span<const double> v);
/// Sum of conj(u[i]) * v[i].
cplx inner_product(std::span<const cplx> u, std::span<const cplx> v);

ComplexVector matvec(const DenseComplexMatrix& m, std::span<const cplx> v);
ComplexVector matvec_adjoint(const DenseComplexMatrix& m, std::span<const cplx> v);
DenseComplexMatrix matmul(const DenseComplexMatrix& a, const DenseComplexMatrix& b);
/// Tr(a^H b); both matrices must have identical shape.
cplx trace_adjoint_product(const DenseComplexMatrix& a, const DenseComplexMatrix& b);
double frobenius_norm(const DenseComplexMatrix& m);

}  // namespace msp
