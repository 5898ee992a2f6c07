#include "msp/linop.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace msp {

LinearOperator dense_operator(const DenseComplexMatrix& m) {
  LinearOperator op;
  op.rows = m.rows;
  op.cols = m.cols;
  op.apply = [&m](std::span<const cplx> in, std::span<cplx> out) {
    ComplexVector r = matvec(m, in);
    std::copy(r.begin(), r.end(), out.begin());
  };
  op.apply_adjoint = [&m](std::span<const cplx> in, std::span<cplx> out) {
    ComplexVector r = matvec_adjoint(m, in);
    std::copy(r.begin(), r.end(), out.begin());
  };
  return op;
}

SpectralNormResult spectral_norm(const LinearOperator& op, int max_iters,
                                 double tol) {
  std::mt19937_64 rng(kPowerIterationSeed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexVector v(op.cols);
  for (cplx& z : v) z = cplx(gauss(rng), gauss(rng));
  double vn = l2_norm(v);
  if (vn == 0.0) return {0.0, true, 0};
  for (cplx& z : v) z /= vn;

  ComplexVector w(op.rows);
  ComplexVector u(op.cols);
  double sigma = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    op.apply(v, w);
    const double sigma_next = l2_norm(w);
    if (sigma_next == 0.0) return {0.0, true, it};
    op.apply_adjoint(w, u);
    const double un = l2_norm(u);
    if (un == 0.0) return {sigma_next, true, it};
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = u[i] / un;
    const bool settled = std::abs(sigma_next - sigma) <= tol * sigma_next;
    sigma = sigma_next;
    if (settled && it > 1) return {sigma, true, it};
  }
  return {sigma, false, max_iters};
}

}  // namespace msp
