#include <algorithm>
#include <cmath>

#include "msp/dft.hpp"
#include "msp/solvers.hpp"

namespace msp {

AfResult reconstruct_probe(const RealGrid& data_center,
                           const ScatteringMatrix& a_hat, ComplexVector p0,
                           const SolverConfig& cfg) {
  const std::size_t dim = a_hat.a.rows;
  if (data_center.size() != dim || p0.size() != dim)
    throw DimensionMismatch("reconstruct_probe: dimensions do not match a_hat");
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));

  AmplitudeFlowProblem prob;
  prob.q.rows = dim;
  prob.q.cols = dim;
  prob.q.apply = [&a_hat, n](std::span<const cplx> p, std::span<cplx> out) {
    const ComplexVector ap = matvec(a_hat.a, p);
    dft2_forward_span(ap, out, n);
  };
  prob.q.apply_adjoint = [&a_hat, n, dim](std::span<const cplx> w,
                                          std::span<cplx> out) {
    ComplexVector back(dim);
    dft2_inverse_span(w, back, n);
    for (cplx& z : back) z *= static_cast<double>(dim);  // F^H = n^2 F^{-1}
    const ComplexVector r = matvec_adjoint(a_hat.a, back);
    std::copy(r.begin(), r.end(), out.begin());
  };
  prob.target_amplitudes.resize(dim);
  for (std::size_t k = 0; k < dim; ++k)
    prob.target_amplitudes[k] = std::sqrt(data_center[k]);

  return af_minimize(prob, std::move(p0), cfg);
}

}  // namespace msp
