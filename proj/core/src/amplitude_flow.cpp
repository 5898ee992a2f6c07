#include <cmath>

#include "msp/solvers.hpp"

namespace msp {

namespace {

/// Residual r = Qz - (Qz/|Qz|) o sqrt(y), with the ratio zeroed at |Qz| = 0.
void amplitude_residual(std::span<const cplx> qz,
                        std::span<const double> target, std::span<cplx> r) {
  for (std::size_t k = 0; k < qz.size(); ++k) {
    const double mag = std::abs(qz[k]);
    r[k] = mag == 0.0 ? cplx{} : qz[k] - qz[k] / mag * target[k];
  }
}

}  // namespace

double af_objective(const AmplitudeFlowProblem& prob, std::span<const cplx> z) {
  ComplexVector qz = prob.q(z);
  double s = 0.0;
  for (std::size_t k = 0; k < qz.size(); ++k) {
    const double d = prob.target_amplitudes[k] - std::abs(qz[k]);
    s += d * d;
  }
  return s;
}

ComplexVector af_gradient(const AmplitudeFlowProblem& prob,
                          std::span<const cplx> z) {
  if (z.size() != prob.q.cols)
    throw DimensionMismatch("af_gradient: iterate length does not match Q");
  if (prob.target_amplitudes.size() != prob.q.rows)
    throw DimensionMismatch("af_gradient: target length does not match Q");
  ComplexVector qz = prob.q(z);
  ComplexVector r(qz.size());
  amplitude_residual(qz, prob.target_amplitudes, r);
  return prob.q.adjoint(r);
}

AfResult af_minimize(const AmplitudeFlowProblem& prob, ComplexVector z0,
                     const SolverConfig& cfg) {
  AfResult result;
  const SpectralNormResult norm = spectral_norm(prob.q);
  result.learning_rate_converged = norm.converged;
  if (norm.value == 0.0) {  // zero operator: nothing to do
    result.z = std::move(z0);
    result.objective = af_objective(prob, result.z);
    result.objective_history = {result.objective};
    return result;
  }
  const double mu = cfg.learning_rate_safety / (norm.value * norm.value);

  ComplexVector z = std::move(z0);
  ComplexVector qz(prob.q.rows);
  ComplexVector r(prob.q.rows);
  ComplexVector g(prob.q.cols);

  double objective = af_objective(prob, z);
  result.objective_history.push_back(objective);

  for (int k = 0; k < cfg.inner_gradient_steps; ++k) {
    prob.q.apply(z, qz);
    amplitude_residual(qz, prob.target_amplitudes, r);
    prob.q.apply_adjoint(r, g);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] -= mu * g[i];

    const double next = af_objective(prob, z);
    if (!std::isfinite(next))
      throw SolverFailure("af_minimize: objective became non-finite");
    result.objective_history.push_back(next);
    ++result.steps;
    const double change = std::abs(objective - next);
    objective = next;
    if (objective == 0.0 || change < cfg.stop_tol * std::max(objective, 1e-300))
      break;
  }
  result.z = std::move(z);
  result.objective = objective;
  return result;
}

}  // namespace msp
