#include "msp/metrics.hpp"

#include <cmath>
#include <sstream>

#include "msp/dft.hpp"

namespace msp {

double relative_reconstruction_error(std::span<const DiagonalOperator> truth,
                                     std::span<const DiagonalOperator> estimate,
                                     std::vector<double>* per_slice) {
  if (truth.size() != estimate.size())
    throw DimensionMismatch("relative_reconstruction_error: slice counts differ");
  if (truth.empty())
    throw DimensionMismatch("relative_reconstruction_error: no slices");
  if (per_slice) per_slice->clear();
  double sum = 0.0;
  for (std::size_t m = 0; m < truth.size(); ++m) {
    if (truth[m].diag.size() != estimate[m].diag.size())
      throw DimensionMismatch("relative_reconstruction_error: diagonal lengths differ");
    const double denom = l2_norm(truth[m].diag);
    if (denom == 0.0)
      throw ZeroNormSlice("relative_reconstruction_error: ground-truth slice " +
                          std::to_string(m + 1) + " has zero norm");
    double num = 0.0;
    for (std::size_t i = 0; i < truth[m].diag.size(); ++i)
      num += std::norm(truth[m].diag[i] - estimate[m].diag[i]);
    const double err = std::sqrt(num) / denom;
    sum += err;
    if (per_slice) per_slice->push_back(err);
  }
  return sum / static_cast<double>(truth.size());
}

double relative_measurement_error(const Dataset4D& data,
                                  const ScatteringMatrix& a_hat,
                                  std::span<const ComplexVector> probes) {
  if (probes.size() != data.intensities.size())
    throw DimensionMismatch("relative_measurement_error: probes do not match data");
  const int n = data.geom.n;
  const std::size_t dim = a_hat.a.rows;
  ComplexVector spectrum(dim);
  double num = 0.0, den = 0.0;
  for (std::size_t s = 0; s < probes.size(); ++s) {
    const ComplexVector exit = matvec(a_hat.a, probes[s]);
    dft2_forward_span(exit, spectrum, n);
    const RealGrid& pattern = data.intensities[s];
    for (std::size_t k = 0; k < dim; ++k) {
      const double target = std::sqrt(pattern[k]);
      const double d = target - std::abs(spectrum[k]);
      num += d * d;
      den += target * target;
    }
  }
  if (den == 0.0)
    throw ZeroData("relative_measurement_error: dataset is identically zero");
  return std::sqrt(num / den);
}

std::vector<DiagonalOperator> align_global(
    std::span<const DiagonalOperator> estimate,
    std::span<const DiagonalOperator> truth, int* degenerate_count) {
  if (truth.size() != estimate.size())
    throw DimensionMismatch("align_global: slice counts differ");
  std::vector<DiagonalOperator> aligned(estimate.begin(), estimate.end());
  if (degenerate_count) *degenerate_count = 0;
  for (std::size_t m = 0; m < truth.size(); ++m) {
    if (truth[m].diag.size() != estimate[m].diag.size())
      throw DimensionMismatch("align_global: diagonal lengths differ");
    const cplx self = inner_product(estimate[m].diag, estimate[m].diag);
    cplx scale = 0.0;
    if (std::real(self) > 0.0) {
      scale = inner_product(estimate[m].diag, truth[m].diag) / self;
    } else if (degenerate_count) {
      ++*degenerate_count;
    }
    for (cplx& z : aligned[m].diag) z *= scale;
  }
  return aligned;
}

std::string error_report_csv_header(int slice_count) {
  std::ostringstream out;
  out << "iteration,relative_measurement_error,"
         "relative_reconstruction_error_raw,relative_reconstruction_error_aligned";
  for (int m = 1; m <= slice_count; ++m) out << ",slice_" << m << "_error";
  return out.str();
}

std::string error_report_csv_row(const ErrorReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << report.iteration << ',' << report.relative_measurement_error;
  if (report.has_reconstruction_error) {
    out << ',' << report.relative_reconstruction_error_raw << ','
        << report.relative_reconstruction_error_aligned;
    for (double e : report.per_slice_errors) out << ',' << e;
  } else {
    out << ",,";
  }
  return out.str();
}

}  // namespace msp
