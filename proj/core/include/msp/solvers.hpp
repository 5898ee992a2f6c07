#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "msp/chain.hpp"
#include "msp/forward.hpp"
#include "msp/linop.hpp"
#include "msp/types.hpp"

namespace msp {

class SolverFailure : public std::runtime_error {
public:
  explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

class ZeroDenominator : public std::invalid_argument {
public:
  explicit ZeroDenominator(const std::string& what) : std::invalid_argument(what) {}
};

/// Phase retrieval instance: recover z from amplitudes sqrt(y) = |Q z|.
struct AmplitudeFlowProblem {
  LinearOperator q;
  std::vector<double> target_amplitudes;  // sqrt(y), length q.rows
};

struct SolverConfig {
  int outer_iters = 100;          // T
  int inner_gradient_steps = 30;  // K
  double stop_tol = 1e-6;         // relative objective-change threshold
  std::uint64_t seed = 1;
  double learning_rate_safety = 1.0;  // multiplier in (0,1] on 1/||Q||^2
};

/// Q^H (Qz - (Qz/|Qz|) o sqrt(y)); the ratio is 0 wherever (Qz)_k = 0.
ComplexVector af_gradient(const AmplitudeFlowProblem& prob,
                          std::span<const cplx> z);

double af_objective(const AmplitudeFlowProblem& prob, std::span<const cplx> z);

struct AfResult {
  ComplexVector z;
  double objective = 0.0;
  int steps = 0;
  std::vector<double> objective_history;  // objective before each step + final
  bool learning_rate_converged = true;    // spectral-norm power iteration status
};

/// Gradient descent with mu = safety / ||Q||^2, at most
/// cfg.inner_gradient_steps steps, stopping early once the relative objective
/// change drops below cfg.stop_tol.
AfResult af_minimize(const AmplitudeFlowProblem& prob, ComplexVector z0,
                     const SolverConfig& cfg);

struct IterationRecord {
  int iteration = 0;
  double measurement_error = 0.0;
};

struct ReconstructionState {
  std::vector<DiagonalOperator> slices;  // current slice estimates
  double fidelity_scale = 1.0;           // the data-fidelity scalar
  std::optional<ScatteringMatrix> a_estimate;
  std::vector<IterationRecord> history;
  std::vector<double> fidelity_history;
  std::vector<std::string> warnings;
  int degenerate_projections = 0;
};

/// All-ones diagonals (vacuum slices), fidelity scale 1.
ReconstructionState identity_init(int n, int slice_count);

using IterationCallback =
    std::function<void(const ReconstructionState&, int iteration)>;

/// Relative measurement error of the state's current stack against the data:
/// ||sqrt(I) - |F A P|||_F / ||sqrt(I)||_F with A applied matrix-free.
double state_measurement_error(const ReconstructionState& state,
                               const Dataset4D& data,
                               std::span<const ComplexVector> probes,
                               std::span<const PropagatorKernel> kernels);

/// Alternating per-slice Amplitude Flow over the stacked position operator.
ReconstructionState layerwise_reconstruct(
    const Dataset4D& data, std::span<const ComplexVector> probes,
    std::span<const PropagatorKernel> kernels, ReconstructionState init,
    const SolverConfig& cfg, const IterationCallback& on_iteration = {});

struct EstimateResult {
  ScatteringMatrix a;
  std::vector<double> objective_history;
  bool learning_rate_converged = true;
};

/// Gradient descent on the dense transfer matrix with the closed-form
/// learning rate 1 / (n^2 ||P||^2).
EstimateResult estimate_scattering(const Dataset4D& data,
                                   std::span<const ComplexVector> probes,
                                   const ScatteringMatrix& a0,
                                   const SolverConfig& cfg);

struct ProjectionResult {
  DiagonalOperator op;
  bool degenerate = false;  // all-zero diagonal annihilated by the projection
};

/// Keep the main diagonal, drop everything else, scale to unit Euclidean
/// norm. The all-zero diagonal is returned unchanged with the flag set.
ProjectionResult project_diag_normalized(const DenseComplexMatrix& x);
ProjectionResult project_diag_normalized(const DiagonalOperator& x);

/// Pre-projection gradient of 1/2 ||a_hat - lambda R diag(o) S||_F^2 for
/// slice ell, restricted to the diagonal:
/// lambda * diag(R^H (lambda R O S - a_hat) S^H).
ComplexVector prox_gradient_diag(const ScatteringMatrix& a_hat,
                                 std::span<const PropagatorKernel> kernels,
                                 const ReconstructionState& state, int ell);

/// One proximal projected-gradient sweep over all slices with step 1/c,
/// c = (lambda ||R|| ||S||)^2 bounded via the diagonal-product norm bound and
/// clamped below by 1e-12.
ReconstructionState sparse_decompose(const ScatteringMatrix& a_hat,
                                     std::span<const PropagatorKernel> kernels,
                                     ReconstructionState state,
                                     const SolverConfig& cfg);

/// 1/2 ||a_hat - lambda * (stack chain)||_F^2, evaluated column by column.
double decomposition_objective(const ScatteringMatrix& a_hat,
                               std::span<const PropagatorKernel> kernels,
                               const ReconstructionState& state);

/// Real least-squares optimum of ||a_hat - lambda a_tilde||_F over real
/// lambda: Re Tr(a_hat^H a_tilde) / Tr(a_tilde^H a_tilde).
double update_fidelity_scale(const ScatteringMatrix& a_hat,
                             const ScatteringMatrix& a_tilde);

/// Two-stage outer loop: estimate the dense transfer matrix from the data,
/// factor it into normalised diagonal slices between the fixed propagators,
/// refit the fidelity scale, reassemble, repeat. On return the slices carry
/// the M-th root of the final scale.
ReconstructionState sparse_matrix_decomposition(
    const Dataset4D& data, std::span<const ComplexVector> probes,
    std::span<const PropagatorKernel> kernels, ReconstructionState init,
    const SolverConfig& cfg, const IterationCallback& on_iteration = {});

/// Amplitude Flow for the probe at one position from its pattern:
/// minimise 1/2 ||sqrt(i_c) - |F a_hat p|||^2 over p.
AfResult reconstruct_probe(const RealGrid& data_center,
                           const ScatteringMatrix& a_hat, ComplexVector p0,
                           const SolverConfig& cfg);

}  // namespace msp
