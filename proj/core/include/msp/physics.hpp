#pragma once

#include <array>

#include "msp/types.hpp"

namespace msp {

class InvalidVoltage : public std::invalid_argument {
public:
  explicit InvalidVoltage(const std::string& what) : std::invalid_argument(what) {}
};

// CODATA 2018 values; h, c, e are exact by definition since the SI revision.
namespace constants {
inline constexpr double planck = 6.62607015e-34;        // J s
inline constexpr double light_speed = 299792458.0;      // m / s
inline constexpr double electron_charge = 1.602176634e-19;  // C
inline constexpr double electron_mass = 9.1093837015e-31;   // kg
}  // namespace constants

/// Relativistic electron wavelength lambda = h c / sqrt(e^2 U^2 + 2 e U m c^2).
double electron_wavelength(double voltage_volts);

/// Relativistic interaction constant, used only to scale default phase-grating
/// strengths between acceleration voltages (rad / (V m), up to a shared factor).
double interaction_constant(double voltage_volts);

struct BeamParameters {
  double voltage = 0.0;         // V
  double wavelength = 0.0;      // m, derived
  double semiconv_angle = 0.0;  // rad
  double q_max = 0.0;           // 1/m, derived as sin(alpha)/lambda
};

BeamParameters make_beam(double voltage_volts, double semiconv_angle_rad);

struct SamplingGeometry {
  int n = 0;                // grid side in pixels
  double pixel_size = 0.0;  // m per pixel

  /// Reciprocal-space sampling step 1/(n * pixel_size).
  double q_step() const { return 1.0 / (n * pixel_size); }
  /// Wrapped spatial frequency for integer index k (standard DFT ordering).
  double frequency(long k) const { return static_cast<double>(signed_offset(k, n)) * q_step(); }
};

/// 2 J1(t) / t with the removable singularity at t = 0 evaluating to 1.
double airy_amplitude(double t);

/// Bessel function of the first kind, order 1. Ascending series for
/// |t| <= 12, Hankel asymptotic expansion beyond; absolute accuracy
/// better than 1e-10 over the probe's argument range.
double bessel_j1(double t);

/// Aberration-free probe p[y,x] = pi q_max^2 * airy_amplitude(2 pi q_max r),
/// r measured in physical units from wrapped pixel offsets, peak at (0,0).
/// Rescaled so that sum |p|^2 = 1 unless `normalise` is false.
ComplexGrid make_probe(const BeamParameters& beam, const SamplingGeometry& geom,
                       bool normalise = true);

/// Cyclic integer-pixel shift: out[y,x] = p[y - ys, x - xs].
ComplexGrid shift_probe(const ComplexGrid& p, long xs, long ys);

/// Reciprocal-space Fresnel kernel; every entry is a pure phase.
struct PropagatorKernel {
  ComplexGrid h;
  double distance = 0.0;              // m
  std::array<double, 2> tilt{0.0, 0.0};  // (theta_x, theta_y) rad
};

/// h[y,x] = exp(-pi i d lambda ((qy^2 + qx^2)
///                              + 2 (qx sin(tx)/lambda + qy sin(ty)/lambda)))
/// on the wrapped frequency grid.
PropagatorKernel make_propagator(const SamplingGeometry& geom, double wavelength,
                                 double distance,
                                 std::array<double, 2> tilt = {0.0, 0.0});

/// Free-space step: inverse DFT of (forward DFT of e) * h.
ComplexGrid propagate(const ComplexGrid& e, const PropagatorKernel& kernel);

/// Span-based propagation used by the operator chains; `adjoint` applies the
/// conjugated kernel, which is the exact adjoint since the kernel is unitary.
void propagate_span(std::span<const cplx> in, std::span<cplx> out,
                    const PropagatorKernel& kernel, bool adjoint = false);

}  // namespace msp
