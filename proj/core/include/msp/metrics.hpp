#pragma once

#include <vector>

#include "msp/chain.hpp"
#include "msp/forward.hpp"
#include "msp/types.hpp"

namespace msp {

class ZeroNormSlice : public std::invalid_argument {
public:
  explicit ZeroNormSlice(const std::string& what) : std::invalid_argument(what) {}
};

class ZeroData : public std::invalid_argument {
public:
  explicit ZeroData(const std::string& what) : std::invalid_argument(what) {}
};

struct ErrorReport {
  int iteration = 0;
  double relative_measurement_error = 0.0;
  double relative_reconstruction_error_raw = 0.0;
  double relative_reconstruction_error_aligned = 0.0;
  std::vector<double> per_slice_errors;  // aligned, one per slice
  bool has_reconstruction_error = false;
};

/// Mean over slices of ||o_m - o_hat_m||_2 / ||o_m||_2 on the diagonals.
double relative_reconstruction_error(std::span<const DiagonalOperator> truth,
                                     std::span<const DiagonalOperator> estimate,
                                     std::vector<double>* per_slice = nullptr);

/// ||sqrt(I) - |F a_hat P|||_F / ||sqrt(I)||_F.
double relative_measurement_error(const Dataset4D& data,
                                  const ScatteringMatrix& a_hat,
                                  std::span<const ComplexVector> probes);

/// Per slice, rescale the estimate by the least-squares complex scalar
/// argmin_c ||o_m - c o_hat_m||, compensating the global phase and scale
/// freedoms before scoring. A zero estimate slice maps to zero (flagged via
/// the optional counter).
std::vector<DiagonalOperator> align_global(
    std::span<const DiagonalOperator> estimate,
    std::span<const DiagonalOperator> truth, int* degenerate_count = nullptr);

/// CSV header and one row per record, matching the reconstruction history
/// files written by the command-line tool.
std::string error_report_csv_header(int slice_count);
std::string error_report_csv_row(const ErrorReport& report);

}  // namespace msp
