#include <algorithm>
#include <cmath>

#include "msp/dft.hpp"
#include "msp/solvers.hpp"

namespace msp {

namespace {

DenseComplexMatrix probe_matrix(std::span<const ComplexVector> probes) {
  const std::size_t dim = probes.front().size();
  DenseComplexMatrix p(dim, probes.size());
  for (std::size_t s = 0; s < probes.size(); ++s)
    for (std::size_t i = 0; i < dim; ++i) p.at(i, s) = probes[s][i];
  return p;
}

}  // namespace

EstimateResult estimate_scattering(const Dataset4D& data,
                                   std::span<const ComplexVector> probes,
                                   const ScatteringMatrix& a0,
                                   const SolverConfig& cfg) {
  const int n = data.geom.n;
  const std::size_t dim = static_cast<std::size_t>(n) * n;
  const std::size_t positions = probes.size();
  if (a0.a.rows != dim || a0.a.cols != dim)
    throw DimensionMismatch("estimate_scattering: matrix shape does not match data");
  if (positions != data.intensities.size())
    throw DimensionMismatch("estimate_scattering: probes do not match data");

  const DenseComplexMatrix p = probe_matrix(probes);
  const SpectralNormResult probe_norm = spectral_norm(dense_operator(p));
  EstimateResult result;
  result.learning_rate_converged = probe_norm.converged;
  if (probe_norm.value == 0.0)
    throw SolverFailure("estimate_scattering: zero probe matrix");
  // mu = 1 / (||F||^2 ||P||^2) = 1 / (n^2 ||P||^2)
  const double mu = cfg.learning_rate_safety /
                    (static_cast<double>(dim) * probe_norm.value * probe_norm.value);

  std::vector<std::vector<double>> target(positions);
  for (std::size_t s = 0; s < positions; ++s) {
    target[s].resize(dim);
    for (std::size_t k = 0; k < dim; ++k)
      target[s][k] = std::sqrt(data.intensities[s][k]);
  }

  DenseComplexMatrix a = a0.a;
  ComplexVector column(dim), spectrum(dim), back(dim);
  DenseComplexMatrix residual_lift(dim, positions);

  for (int step = 0; step <= cfg.inner_gradient_steps; ++step) {
    double objective = 0.0;
    for (std::size_t s = 0; s < positions; ++s) {
      // column s of F A P and its amplitude residual
      for (std::size_t i = 0; i < dim; ++i) {
        cplx acc = 0.0;
        const cplx* row = a.data.data() + i * dim;
        for (std::size_t j = 0; j < dim; ++j) acc += row[j] * probes[s][j];
        column[i] = acc;
      }
      dft2_forward_span(column, spectrum, n);
      for (std::size_t k = 0; k < dim; ++k) {
        const double mag = std::abs(spectrum[k]);
        const double diff = mag - target[s][k];
        objective += diff * diff;
        spectrum[k] = mag == 0.0 ? cplx{} : spectrum[k] / mag * diff;
      }
      // F^H applied to the residual column
      dft2_inverse_span(spectrum, back, n);
      for (std::size_t i = 0; i < dim; ++i)
        residual_lift.at(i, s) = back[i] * static_cast<double>(dim);
    }
    result.objective_history.push_back(objective);
    if (!std::isfinite(objective))
      throw SolverFailure("estimate_scattering: objective became non-finite");
    if (step == cfg.inner_gradient_steps) break;

    // A <- A - mu * residual_lift * P^H
    for (std::size_t s = 0; s < positions; ++s) {
      for (std::size_t i = 0; i < dim; ++i) {
        const cplx w = mu * residual_lift.at(i, s);
        if (w == cplx{}) continue;
        cplx* row = a.data.data() + i * dim;
        for (std::size_t j = 0; j < dim; ++j) row[j] -= w * std::conj(probes[s][j]);
      }
    }
  }

  result.a = ScatteringMatrix{std::move(a)};
  return result;
}

ProjectionResult project_diag_normalized(const DiagonalOperator& x) {
  ProjectionResult result;
  result.op.diag = x.diag;
  const double norm = l2_norm(result.op.diag);
  if (norm == 0.0) {
    result.degenerate = true;
    return result;
  }
  for (cplx& z : result.op.diag) z /= norm;
  return result;
}

ProjectionResult project_diag_normalized(const DenseComplexMatrix& x) {
  if (x.rows != x.cols)
    throw DimensionMismatch("project_diag_normalized: matrix is not square");
  DiagonalOperator d;
  d.diag.resize(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) d.diag[i] = x.at(i, i);
  return project_diag_normalized(d);
}

ComplexVector prox_gradient_diag(const ScatteringMatrix& a_hat,
                                 std::span<const PropagatorKernel> kernels,
                                 const ReconstructionState& state, int ell) {
  const std::size_t dim = a_hat.a.rows;
  auto [prefix, suffix] = prefix_suffix(state.slices, kernels, ell);
  const ComplexVector& o = state.slices[ell - 1].diag;
  const double lambda = state.fidelity_scale;

  // diag(R^H W S^H)_k = <R e_k, W S^H e_k> with W = lambda R O S - a_hat;
  // only the diagonal is ever formed.
  ComplexVector basis(dim), v(dim), w(dim), r(dim);
  ComplexVector grad(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    std::fill(basis.begin(), basis.end(), cplx{});
    basis[k] = 1.0;
    suffix.apply_adjoint(basis, v);

    ComplexVector sv = suffix(v);
    for (std::size_t i = 0; i < dim; ++i) sv[i] *= o[i];
    prefix.apply(sv, w);
    const ComplexVector av = matvec(a_hat.a, v);
    for (std::size_t i = 0; i < dim; ++i) w[i] = lambda * w[i] - av[i];

    prefix.apply(basis, r);
    grad[k] = lambda * inner_product(r, w);
  }
  return grad;
}

ReconstructionState sparse_decompose(const ScatteringMatrix& a_hat,
                                     std::span<const PropagatorKernel> kernels,
                                     ReconstructionState state,
                                     const SolverConfig& cfg) {
  (void)cfg;
  const int slice_count = static_cast<int>(state.slices.size());
  const double lambda = state.fidelity_scale;

  for (int ell = 1; ell <= slice_count; ++ell) {
    auto [prefix, suffix] = prefix_suffix(state.slices, kernels, ell);
    // c >= (lambda ||R|| ||S||)^2 via the diagonal-product norm bound, which
    // dominates any power-iteration estimate and keeps the step safe.
    const double c = std::max(
        std::pow(lambda * prefix.norm_bound() * suffix.norm_bound(), 2), 1e-12);
    const double mu = 1.0 / c;

    const ComplexVector grad = prox_gradient_diag(a_hat, kernels, state, ell);
    DiagonalOperator moved;
    moved.diag = state.slices[ell - 1].diag;
    for (std::size_t i = 0; i < moved.diag.size(); ++i)
      moved.diag[i] -= mu * grad[i];

    ProjectionResult projected = project_diag_normalized(moved);
    if (projected.degenerate) {
      ++state.degenerate_projections;
      state.warnings.push_back("sparse_decompose: degenerate projection at slice " +
                               std::to_string(ell));
    }
    state.slices[ell - 1] = std::move(projected.op);
  }
  return state;
}

double decomposition_objective(const ScatteringMatrix& a_hat,
                               std::span<const PropagatorKernel> kernels,
                               const ReconstructionState& state) {
  const ChainOperator chain = full_chain(state.slices, kernels);
  const std::size_t dim = chain.dim();
  ComplexVector basis(dim), column(dim);
  double sum = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    std::fill(basis.begin(), basis.end(), cplx{});
    basis[j] = 1.0;
    chain.apply(basis, column);
    for (std::size_t i = 0; i < dim; ++i)
      sum += std::norm(a_hat.a.at(i, j) - state.fidelity_scale * column[i]);
  }
  return 0.5 * sum;
}

double update_fidelity_scale(const ScatteringMatrix& a_hat,
                             const ScatteringMatrix& a_tilde) {
  if (a_hat.a.rows != a_tilde.a.rows || a_hat.a.cols != a_tilde.a.cols)
    throw DimensionMismatch("update_fidelity_scale: shape mismatch");
  const double den = std::real(trace_adjoint_product(a_tilde.a, a_tilde.a));
  if (den == 0.0)
    throw ZeroDenominator("update_fidelity_scale: a_tilde is identically zero");
  return std::real(trace_adjoint_product(a_hat.a, a_tilde.a)) / den;
}

ReconstructionState sparse_matrix_decomposition(
    const Dataset4D& data, std::span<const ComplexVector> probes,
    std::span<const PropagatorKernel> kernels, ReconstructionState init,
    const SolverConfig& cfg, const IterationCallback& on_iteration) {
  if (probes.size() != data.intensities.size())
    throw DimensionMismatch("sparse_matrix_decomposition: probes do not match data");
  if (init.slices.empty())
    throw std::invalid_argument("sparse_matrix_decomposition: no slices");

  ReconstructionState state = std::move(init);
  const int slice_count = static_cast<int>(state.slices.size());

  // A^0 assembled from the initial slices (and scale) through the chain.
  ScatteringMatrix a_current = materialise(full_chain(state.slices, kernels));
  if (state.fidelity_scale != 1.0)
    for (cplx& z : a_current.a.data) z *= state.fidelity_scale;

  double previous_error = state_measurement_error(state, data, probes, kernels);
  state.history.push_back({0, previous_error});
  state.fidelity_history.push_back(state.fidelity_scale);
  int stall_count = 0;

  for (int t = 1; t <= cfg.outer_iters; ++t) {
    EstimateResult estimate = estimate_scattering(data, probes, a_current, cfg);
    if (!estimate.learning_rate_converged)
      state.warnings.push_back(
          "sparse: probe-norm power iteration did not converge at t=" +
          std::to_string(t));
    state.a_estimate = estimate.a;

    state = sparse_decompose(estimate.a, kernels, std::move(state), cfg);

    const ScatteringMatrix a_tilde = materialise(full_chain(state.slices, kernels));
    state.fidelity_scale = update_fidelity_scale(estimate.a, a_tilde);
    state.fidelity_history.push_back(state.fidelity_scale);

    a_current = a_tilde;
    for (cplx& z : a_current.a.data) z *= state.fidelity_scale;

    const double error = state_measurement_error(state, data, probes, kernels);
    state.history.push_back({t, error});
    if (on_iteration) on_iteration(state, t);

    const double rel_change =
        std::abs(previous_error - error) / std::max(previous_error, 1e-300);
    stall_count = rel_change < cfg.stop_tol ? stall_count + 1 : 0;
    previous_error = error;
    if (stall_count >= 5) break;
  }

  // Distribute the final scale into the slices: (lambda)^(1/M) each. A
  // negative scale contributes its magnitude's root to every slice and its
  // sign to slice 1 only.
  const double lambda = state.fidelity_scale;
  const double root = std::pow(std::abs(lambda), 1.0 / slice_count);
  for (int m = 0; m < slice_count; ++m) {
    double f = root;
    if (lambda < 0.0 && m == 0) f = -root;
    for (cplx& z : state.slices[m].diag) z *= f;
  }
  state.fidelity_scale = 1.0;
  return state;
}

}  // namespace msp
