#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "msp/dft.hpp"
#include "msp/linop.hpp"
#include "msp/types.hpp"
#include "support/oracles.hpp"

using msp::cplx;
using msp::ComplexGrid;
using msp::ComplexVector;

TEST_CASE("dft2_forward of a delta is the all-ones grid") {
  ComplexGrid g(2);
  g(0, 0) = 1.0;
  ComplexGrid out = msp::dft2_forward(g);
  for (const cplx& z : out.data()) CHECK(std::abs(z - cplx{1.0}) < 1e-15);
}

TEST_CASE("dft2_forward of the constant grid concentrates at the origin") {
  ComplexGrid g(2, ComplexVector(4, 1.0));
  ComplexGrid out = msp::dft2_forward(g);
  CHECK(std::abs(out(0, 0) - cplx{4.0}) < 1e-14);
  CHECK(std::abs(out(0, 1)) < 1e-14);
  CHECK(std::abs(out(1, 0)) < 1e-14);
  CHECK(std::abs(out(1, 1)) < 1e-14);
}

TEST_CASE("dft2_forward matches the direct double-sum oracle and Parseval") {
  ComplexGrid g = oracle::random_grid(4, 11);
  ComplexGrid fast = msp::dft2_forward(g);
  ComplexGrid slow = oracle::naive_dft2(g);
  double in_energy = 0.0, out_energy = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(fast.data()[i] - slow.data()[i]) < 1e-12);
    in_energy += std::norm(g.data()[i]);
    out_energy += std::norm(fast.data()[i]);
  }
  CHECK(out_energy == doctest::Approx(16.0 * in_energy).epsilon(1e-12));
}

TEST_CASE("dft2_inverse round-trips and matches the dense adjoint oracle") {
  SUBCASE("round-trip on random grids, including non-power-of-two sides") {
    for (int n : {8, 40}) {
      ComplexGrid g = oracle::random_grid(n, 21 + n);
      ComplexGrid back = msp::dft2_inverse(msp::dft2_forward(g));
      CHECK(oracle::relative_l2_difference(msp::vectorise(back),
                                           msp::vectorise(g)) < 1e-12);
    }
  }
  SUBCASE("inverse of the concentrated spectrum is the constant grid") {
    ComplexGrid g(2);
    g(0, 0) = 4.0;
    ComplexGrid out = msp::dft2_inverse(g);
    for (const cplx& z : out.data()) CHECK(std::abs(z - cplx{1.0}) < 1e-14);
  }
  SUBCASE("matches conjugate-transpose-over-n^2 of the dense DFT matrix") {
    const int n = 4;
    ComplexGrid g = oracle::random_grid(n, 33);
    ComplexVector dense = msp::matvec(oracle::dense_idft_matrix(n), msp::vectorise(g));
    ComplexVector fast = msp::vectorise(msp::dft2_inverse(g));
    CHECK(oracle::max_abs_difference(fast, dense) < 1e-12);
  }
}

TEST_CASE("hadamard_as_diag") {
  SUBCASE("all-ones grid is the multiplicative identity") {
    ComplexGrid ones(3, ComplexVector(9, 1.0));
    ComplexGrid b = oracle::random_grid(3, 5);
    CHECK(oracle::max_abs_difference(msp::hadamard_as_diag(ones, b),
                                     msp::vectorise(b)) == 0.0);
  }
  SUBCASE("zero grids give the zero vector") {
    ComplexGrid z(2);
    for (const cplx& v : msp::hadamard_as_diag(z, z)) CHECK(v == cplx{});
  }
  SUBCASE("equals the explicit dense diag product both ways") {
    ComplexGrid a = oracle::random_grid(3, 6);
    ComplexGrid b = oracle::random_grid(3, 7);
    const std::size_t dim = a.size();
    msp::DenseComplexMatrix diag_a(dim, dim), diag_b(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
      diag_a.at(i, i) = a.data()[i];
      diag_b.at(i, i) = b.data()[i];
    }
    ComplexVector via_a = msp::matvec(diag_a, msp::vectorise(b));
    ComplexVector via_b = msp::matvec(diag_b, msp::vectorise(a));
    ComplexVector direct = msp::hadamard_as_diag(a, b);
    CHECK(oracle::max_abs_difference(direct, via_a) < 1e-14);
    CHECK(oracle::max_abs_difference(direct, via_b) < 1e-14);
  }
  SUBCASE("size mismatch throws") {
    CHECK_THROWS_AS(msp::hadamard_as_diag(ComplexGrid(2), ComplexGrid(3)),
                    msp::DimensionMismatch);
  }
}

namespace {

msp::LinearOperator scaled_identity(std::size_t dim, double scale) {
  msp::LinearOperator op;
  op.rows = op.cols = dim;
  op.apply = [scale](std::span<const cplx> in, std::span<cplx> out) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = scale * in[i];
  };
  op.apply_adjoint = op.apply;
  return op;
}

}  // namespace

TEST_CASE("spectral_norm") {
  SUBCASE("3x identity on dim 10") {
    auto r = msp::spectral_norm(scaled_identity(10, 3.0));
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(3.0).epsilon(1e-12));
  }
  SUBCASE("diagonal operator diag(1,2,5)") {
    msp::DenseComplexMatrix d(3, 3);
    d.at(0, 0) = 1.0;
    d.at(1, 1) = 2.0;
    d.at(2, 2) = 5.0;
    auto r = msp::spectral_norm(msp::dense_operator(d), 500, 1e-12);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(5.0).epsilon(1e-9));
  }
  SUBCASE("random 12x12 matches the dense SVD oracle") {
    msp::DenseComplexMatrix m = oracle::random_matrix(12, 12, 99);
    auto r = msp::spectral_norm(msp::dense_operator(m), 2000, 1e-12);
    CHECK(r.converged);
    Eigen::MatrixXcd em(12, 12);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) em(i, j) = m.at(i, j);
    const double sigma = Eigen::JacobiSVD<Eigen::MatrixXcd>(em).singularValues()(0);
    CHECK(std::abs(r.value - sigma) < 1e-6 * sigma);
  }
  SUBCASE("unitary operator (the scaled DFT) returns 1") {
    const int n = 4;
    msp::LinearOperator op;
    op.rows = op.cols = 16;
    op.apply = [n](std::span<const cplx> in, std::span<cplx> out) {
      msp::dft2_forward_span(in, out, n);
      for (cplx& z : out) z /= n;
    };
    op.apply_adjoint = [n](std::span<const cplx> in, std::span<cplx> out) {
      msp::dft2_inverse_span(in, out, n);
      for (cplx& z : out) z *= n;
    };
    auto r = msp::spectral_norm(op);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("exhausted budget flags non-convergence but returns the estimate") {
    msp::DenseComplexMatrix m = oracle::random_matrix(12, 12, 7);
    auto r = msp::spectral_norm(msp::dense_operator(m), 1, 1e-15);
    CHECK_FALSE(r.converged);
    CHECK(r.value > 0.0);
  }
  SUBCASE("deterministic across calls") {
    msp::DenseComplexMatrix m = oracle::random_matrix(9, 9, 13);
    auto a = msp::spectral_norm(msp::dense_operator(m));
    auto b = msp::spectral_norm(msp::dense_operator(m));
    CHECK(a.value == b.value);
  }
}

TEST_CASE("unnormalised forward DFT has operator norm n") {
  // ||F||^2 = n^2, the identity behind the closed-form learning rates.
  const int n = 4;
  msp::LinearOperator op;
  op.rows = op.cols = static_cast<std::size_t>(n) * n;
  op.apply = [n](std::span<const cplx> in, std::span<cplx> out) {
    msp::dft2_forward_span(in, out, n);
  };
  op.apply_adjoint = [n](std::span<const cplx> in, std::span<cplx> out) {
    msp::dft2_inverse_span(in, out, n);
    for (cplx& z : out) z *= static_cast<double>(n) * n;
  };
  auto r = msp::spectral_norm(op);
  CHECK(r.value == doctest::Approx(4.0).epsilon(1e-10));
}
