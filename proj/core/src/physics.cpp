#include "msp/physics.hpp"

#include <cmath>
#include <numbers>

#include "msp/dft.hpp"

namespace msp {

namespace {
constexpr double pi = std::numbers::pi;
}

double electron_wavelength(double voltage_volts) {
  if (voltage_volts <= 0.0)
    throw InvalidVoltage("electron_wavelength: voltage must be positive");
  using namespace constants;
  const double eU = electron_charge * voltage_volts;
  const double mc2 = electron_mass * light_speed * light_speed;
  return planck * light_speed / std::sqrt(eU * eU + 2.0 * eU * mc2);
}

double interaction_constant(double voltage_volts) {
  if (voltage_volts <= 0.0)
    throw InvalidVoltage("interaction_constant: voltage must be positive");
  using namespace constants;
  const double mc2 = electron_mass * light_speed * light_speed;
  const double eU = electron_charge * voltage_volts;
  const double lambda = electron_wavelength(voltage_volts);
  return 2.0 * pi / (lambda * voltage_volts) * (mc2 + eU) / (2.0 * mc2 + eU);
}

BeamParameters make_beam(double voltage_volts, double semiconv_angle_rad) {
  BeamParameters b;
  b.voltage = voltage_volts;
  b.wavelength = electron_wavelength(voltage_volts);
  b.semiconv_angle = semiconv_angle_rad;
  b.q_max = std::sin(semiconv_angle_rad) / b.wavelength;
  return b;
}

double bessel_j1(double t) {
  const double at = std::abs(t);
  double value;
  if (at <= 12.0) {
    // J1(t) = (t/2) sum_k (-t^2/4)^k / (k! (k+1)!)
    const double x = -0.25 * t * t;
    double term = 0.5 * at;
    double sum = term;
    for (int k = 1; k <= 64; ++k) {
      term *= x / (static_cast<double>(k) * (k + 1));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    value = sum;
  } else {
    // Hankel expansion: J1 = sqrt(2/(pi t)) (P cos chi - Q sin chi),
    // chi = t - 3 pi / 4, with coefficients h_k = h_{k-1} (4-(2k-1)^2)/(8k).
    double h = 1.0;
    double p = 1.0, q = 0.0;
    double tp = 1.0;  // t^{-k}
    for (int k = 1; k <= 20; ++k) {
      h *= (4.0 - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k);
      tp /= at;
      const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
      if (k % 2 == 0)
        p += sign * h * tp;
      else
        q += sign * h * tp;
    }
    const double chi = at - 0.75 * pi;
    value = std::sqrt(2.0 / (pi * at)) * (p * std::cos(chi) - q * std::sin(chi));
  }
  return t < 0.0 ? -value : value;
}

double airy_amplitude(double t) {
  if (std::abs(t) < 1e-8) {
    // 2 J1(t)/t = 1 - t^2/8 + O(t^4)
    return 1.0 - t * t / 8.0;
  }
  return 2.0 * bessel_j1(t) / t;
}

ComplexGrid make_probe(const BeamParameters& beam, const SamplingGeometry& geom,
                       bool normalise) {
  ComplexGrid p(geom.n);
  const double amplitude = pi * beam.q_max * beam.q_max;
  double energy = 0.0;
  for (long y = 0; y < geom.n; ++y) {
    const double dy = static_cast<double>(signed_offset(y, geom.n)) * geom.pixel_size;
    for (long x = 0; x < geom.n; ++x) {
      const double dx = static_cast<double>(signed_offset(x, geom.n)) * geom.pixel_size;
      const double r = std::hypot(dx, dy);
      const double v = amplitude * airy_amplitude(2.0 * pi * beam.q_max * r);
      p(y, x) = v;
      energy += v * v;
    }
  }
  if (normalise) {
    const double scale = 1.0 / std::sqrt(energy);
    for (cplx& z : p.data()) z *= scale;
  }
  return p;
}

ComplexGrid shift_probe(const ComplexGrid& p, long xs, long ys) {
  ComplexGrid out(p.n());
  for (long y = 0; y < p.n(); ++y)
    for (long x = 0; x < p.n(); ++x) out(y, x) = p(y - ys, x - xs);
  return out;
}

PropagatorKernel make_propagator(const SamplingGeometry& geom, double wavelength,
                                 double distance, std::array<double, 2> tilt) {
  PropagatorKernel kernel;
  kernel.distance = distance;
  kernel.tilt = tilt;
  kernel.h = ComplexGrid(geom.n);
  const double tilt_x = std::sin(tilt[0]) / wavelength;
  const double tilt_y = std::sin(tilt[1]) / wavelength;
  for (long y = 0; y < geom.n; ++y) {
    const double qy = geom.frequency(y);
    for (long x = 0; x < geom.n; ++x) {
      const double qx = geom.frequency(x);
      const double phase =
          -pi * distance * wavelength *
          ((qy * qy + qx * qx) + 2.0 * (qx * tilt_x + qy * tilt_y));
      kernel.h(y, x) = std::polar(1.0, phase);
    }
  }
  return kernel;
}

void propagate_span(std::span<const cplx> in, std::span<cplx> out,
                    const PropagatorKernel& kernel, bool adjoint) {
  const int n = kernel.h.n();
  if (in.size() != kernel.h.size() || out.size() != kernel.h.size())
    throw DimensionMismatch("propagate: field and kernel sizes differ");
  ComplexVector spectrum(in.size());
  dft2_forward_span(in, spectrum, n);
  auto h = kernel.h.data();
  if (adjoint) {
    for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= std::conj(h[i]);
  } else {
    for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= h[i];
  }
  dft2_inverse_span(spectrum, out, n);
}

ComplexGrid propagate(const ComplexGrid& e, const PropagatorKernel& kernel) {
  if (e.n() != kernel.h.n())
    throw DimensionMismatch("propagate: field and kernel sizes differ");
  ComplexGrid out(e.n());
  propagate_span(e.data(), out.data(), kernel);
  return out;
}

}  // namespace msp
