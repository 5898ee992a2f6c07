#include <algorithm>
#include <cmath>

#include "msp/dft.hpp"
#include "msp/solvers.hpp"

namespace msp {

ReconstructionState identity_init(int n, int slice_count) {
  ReconstructionState state;
  const std::size_t dim = static_cast<std::size_t>(n) * n;
  state.slices.assign(slice_count, DiagonalOperator{ComplexVector(dim, 1.0)});
  return state;
}

namespace {

std::vector<double> stacked_amplitudes(const Dataset4D& data) {
  const std::size_t dim = data.intensities.front().size();
  std::vector<double> amps(data.intensities.size() * dim);
  for (std::size_t s = 0; s < data.intensities.size(); ++s)
    for (std::size_t k = 0; k < dim; ++k)
      amps[s * dim + k] = std::sqrt(data.intensities[s][k]);
  return amps;
}

}  // namespace

double state_measurement_error(const ReconstructionState& state,
                               const Dataset4D& data,
                               std::span<const ComplexVector> probes,
                               std::span<const PropagatorKernel> kernels) {
  const ChainOperator chain = full_chain(state.slices, kernels);
  const int n = data.geom.n;
  const std::size_t dim = chain.dim();
  ComplexVector exit(dim), spectrum(dim);
  double num = 0.0, den = 0.0;
  for (std::size_t s = 0; s < probes.size(); ++s) {
    chain.apply(probes[s], exit);
    dft2_forward_span(exit, spectrum, n);
    const RealGrid& pattern = data.intensities[s];
    const double scale = std::abs(state.fidelity_scale);
    for (std::size_t k = 0; k < dim; ++k) {
      const double target = std::sqrt(pattern[k]);
      const double d = target - scale * std::abs(spectrum[k]);
      num += d * d;
      den += target * target;
    }
  }
  if (den == 0.0) return 0.0;
  return std::sqrt(num / den);
}

ReconstructionState layerwise_reconstruct(
    const Dataset4D& data, std::span<const ComplexVector> probes,
    std::span<const PropagatorKernel> kernels, ReconstructionState init,
    const SolverConfig& cfg, const IterationCallback& on_iteration) {
  if (probes.size() != data.intensities.size())
    throw DimensionMismatch("layerwise_reconstruct: probes do not match data");
  if (init.slices.empty())
    throw std::invalid_argument("layerwise_reconstruct: no slices to estimate");

  ReconstructionState state = std::move(init);
  const int slice_count = static_cast<int>(state.slices.size());
  const int n = data.geom.n;
  const std::size_t dim = state.slices.front().diag.size();
  const std::size_t positions = probes.size();

  const std::vector<double> target = stacked_amplitudes(data);

  double previous_error = state_measurement_error(state, data, probes, kernels);
  state.history.push_back({0, previous_error});
  int stall_count = 0;

  for (int t = 1; t <= cfg.outer_iters; ++t) {
    for (int ell = 1; ell <= slice_count; ++ell) {
      auto [prefix, suffix] = prefix_suffix(state.slices, kernels, ell);

      // Frozen per-position illuminations u_s = S_l p^s.
      std::vector<ComplexVector> illum(positions);
      for (std::size_t s = 0; s < positions; ++s)
        illum[s] = suffix(probes[s]);

      AmplitudeFlowProblem prob;
      prob.q.rows = positions * dim;
      prob.q.cols = dim;
      prob.q.apply = [&](std::span<const cplx> o, std::span<cplx> out) {
        ComplexVector work(dim);
        for (std::size_t s = 0; s < positions; ++s) {
          for (std::size_t k = 0; k < dim; ++k) work[k] = illum[s][k] * o[k];
          prefix.apply(work, work);
          dft2_forward_span(work, out.subspan(s * dim, dim), n);
        }
      };
      prob.q.apply_adjoint = [&](std::span<const cplx> w, std::span<cplx> out) {
        ComplexVector work(dim);
        std::fill(out.begin(), out.end(), cplx{});
        const double scale = static_cast<double>(dim);  // F^H = n^2 F^{-1}
        for (std::size_t s = 0; s < positions; ++s) {
          dft2_inverse_span(w.subspan(s * dim, dim), work, n);
          for (cplx& z : work) z *= scale;
          prefix.apply_adjoint(work, work);
          for (std::size_t k = 0; k < dim; ++k)
            out[k] += std::conj(illum[s][k]) * work[k];
        }
      };
      prob.target_amplitudes = target;

      AfResult step = af_minimize(prob, state.slices[ell - 1].diag, cfg);
      if (!step.learning_rate_converged)
        state.warnings.push_back(
            "layerwise: spectral-norm power iteration did not converge at t=" +
            std::to_string(t) + " l=" + std::to_string(ell));
      state.slices[ell - 1].diag = std::move(step.z);
    }

    const double error = state_measurement_error(state, data, probes, kernels);
    state.history.push_back({t, error});
    if (on_iteration) on_iteration(state, t);

    const double rel_change =
        std::abs(previous_error - error) / std::max(previous_error, 1e-300);
    stall_count = rel_change < cfg.stop_tol ? stall_count + 1 : 0;
    previous_error = error;
    if (stall_count >= 5) break;
  }
  return state;
}

}  // namespace msp
