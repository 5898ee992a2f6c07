#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "msp/dft.hpp"
#include "msp/physics.hpp"
#include "support/oracles.hpp"

using msp::cplx;
using msp::ComplexGrid;
using msp::ComplexVector;

namespace {
constexpr double pi = std::numbers::pi;

msp::SamplingGeometry geom(int n, double pixel) { return {n, pixel}; }
}  // namespace

TEST_CASE("electron_wavelength") {
  SUBCASE("200 kV is about 2.5 pm") {
    const double lambda = msp::electron_wavelength(200e3);
    CHECK(lambda > 2.49e-12);
    CHECK(lambda < 2.52e-12);
  }
  SUBCASE("80 kV is about 4.18 pm") {
    const double lambda = msp::electron_wavelength(80e3);
    CHECK(lambda > 4.16e-12);
    CHECK(lambda < 4.20e-12);
  }
  SUBCASE("frozen 12-digit regression value at 200 kV") {
    // Evaluated once from the formula with the CODATA 2018 constants.
    CHECK(msp::electron_wavelength(200e3) ==
          doctest::Approx(2.50793404505e-12).epsilon(1e-11));
  }
  SUBCASE("non-positive voltage is rejected") {
    CHECK_THROWS_AS(msp::electron_wavelength(0.0), msp::InvalidVoltage);
    CHECK_THROWS_AS(msp::electron_wavelength(-5.0), msp::InvalidVoltage);
  }
  SUBCASE("interaction constant grows about 40% from 200 kV to 80 kV") {
    const double ratio =
        msp::interaction_constant(80e3) / msp::interaction_constant(200e3);
    CHECK(ratio > 1.3);
    CHECK(ratio < 1.5);
  }
}

TEST_CASE("q_max is inversely proportional to the wavelength") {
  const double alpha = 32e-3;
  const msp::BeamParameters low = msp::make_beam(80e3, alpha);
  const msp::BeamParameters high = msp::make_beam(200e3, alpha);
  CHECK(high.wavelength < low.wavelength);
  CHECK(high.q_max > low.q_max);
  CHECK(high.q_max * high.wavelength ==
        doctest::Approx(low.q_max * low.wavelength).epsilon(1e-12));
}

TEST_CASE("bessel_j1 agrees with the standard-library evaluation") {
  for (double t : {0.1, 0.5, 1.0, 2.0, 3.8317, 5.0, 8.0, 11.9, 12.1, 20.0,
                   35.0, 77.7, 150.0}) {
    CHECK(msp::bessel_j1(t) == doctest::Approx(std::cyl_bessel_j(1, t)).epsilon(1e-10));
  }
}

TEST_CASE("make_probe") {
  const msp::BeamParameters beam = msp::make_beam(200e3, 32e-3);
  const msp::SamplingGeometry g = geom(16, 0.02e-9);

  SUBCASE("value at r = 0 is pi q_max^2 before normalisation") {
    const ComplexGrid raw = msp::make_probe(beam, g, /*normalise=*/false);
    CHECK(std::abs(raw(0, 0) - cplx{pi * beam.q_max * beam.q_max}) <
          1e-6 * pi * beam.q_max * beam.q_max);
  }
  SUBCASE("vanishes at the first zero of J1") {
    // 2 pi q_max r = j_{1,1}: build a geometry whose pixel 1 lands there.
    const double j11 = 3.8317059702075123;
    const double r = j11 / (2.0 * pi * beam.q_max);
    const msp::SamplingGeometry gz = geom(16, r);
    const ComplexGrid raw = msp::make_probe(beam, gz, /*normalise=*/false);
    CHECK(std::abs(raw(0, 1)) < 1e-10 * pi * beam.q_max * beam.q_max);
  }
  SUBCASE("matches an independent J1 evaluation elementwise") {
    const ComplexGrid raw = msp::make_probe(beam, g, /*normalise=*/false);
    const double peak = pi * beam.q_max * beam.q_max;
    for (long y = 0; y < g.n; ++y)
      for (long x = 0; x < g.n; ++x) {
        const double dy = msp::signed_offset(y, g.n) * g.pixel_size;
        const double dx = msp::signed_offset(x, g.n) * g.pixel_size;
        const double t = 2.0 * pi * beam.q_max * std::hypot(dx, dy);
        const double expected =
            t == 0.0 ? peak : peak * 2.0 * std::cyl_bessel_j(1, t) / t;
        CHECK(std::abs(raw(y, x) - cplx{expected}) < 1e-10 * peak);
      }
  }
  SUBCASE("normalised probe has unit energy, is real and centro-symmetric") {
    const ComplexGrid p = msp::make_probe(beam, g);
    double energy = 0.0;
    for (const cplx& z : p.data()) {
      CHECK(z.imag() == 0.0);
      energy += std::norm(z);
    }
    CHECK(energy == doctest::Approx(1.0).epsilon(1e-12));
    for (long y = 0; y < g.n; ++y)
      for (long x = 0; x < g.n; ++x) CHECK(p(y, x) == p(-y, -x));
  }
}

TEST_CASE("shift_probe") {
  const ComplexGrid p = oracle::random_grid(4, 3);
  SUBCASE("zero shift is the identity") {
    const ComplexGrid s = msp::shift_probe(p, 0, 0);
    CHECK(oracle::max_abs_difference(msp::vectorise(s), msp::vectorise(p)) == 0.0);
  }
  SUBCASE("shift by (n, n) wraps to the identity") {
    const ComplexGrid s = msp::shift_probe(p, 4, 4);
    CHECK(oracle::max_abs_difference(msp::vectorise(s), msp::vectorise(p)) == 0.0);
  }
  SUBCASE("a delta translates to the shift target") {
    ComplexGrid delta(4);
    delta(0, 0) = 1.0;
    const ComplexGrid s = msp::shift_probe(delta, 1, 2);
    for (long y = 0; y < 4; ++y)
      for (long x = 0; x < 4; ++x)
        CHECK(s(y, x) == (y == 2 && x == 1 ? cplx{1.0} : cplx{}));
  }
}

TEST_CASE("make_propagator") {
  const msp::SamplingGeometry g = geom(4, 0.05e-9);
  SUBCASE("zero distance and tilt give the all-ones kernel") {
    const msp::PropagatorKernel k = msp::make_propagator(g, 2.5e-12, 0.0);
    for (const cplx& z : k.h.data()) CHECK(std::abs(z - cplx{1.0}) < 1e-15);
  }
  SUBCASE("every entry is a pure phase") {
    const msp::PropagatorKernel k = msp::make_propagator(g, 2.5e-12, 3e-9, {1e-3, -2e-3});
    for (const cplx& z : k.h.data()) CHECK(std::abs(std::abs(z) - 1.0) < 1e-14);
  }
  SUBCASE("entries match the scalar exponent evaluation") {
    const double lambda = 2e-12, distance = 5e-9;  // lambda*distance = 1e-20 m^2
    const std::array<double, 2> tilt{0.7e-3, -0.4e-3};
    const msp::PropagatorKernel k = msp::make_propagator(g, lambda, distance, tilt);
    for (long y = 0; y < g.n; ++y)
      for (long x = 0; x < g.n; ++x) {
        const double qy = msp::signed_offset(y, g.n) / (g.n * g.pixel_size);
        const double qx = msp::signed_offset(x, g.n) / (g.n * g.pixel_size);
        const cplx expected = std::exp(
            cplx(0.0, -pi * distance * lambda *
                          ((qy * qy + qx * qx) +
                           2.0 * (qx * std::sin(tilt[0]) / lambda +
                                  qy * std::sin(tilt[1]) / lambda))));
        CHECK(std::abs(k.h(y, x) - expected) < 1e-12);
      }
  }
}

TEST_CASE("propagate") {
  const msp::SamplingGeometry g = geom(4, 0.05e-9);
  const ComplexGrid e = oracle::random_grid(4, 17);

  SUBCASE("zero-distance kernel is the identity") {
    const msp::PropagatorKernel k = msp::make_propagator(g, 2.5e-12, 0.0);
    const ComplexGrid out = msp::propagate(e, k);
    CHECK(oracle::relative_l2_difference(msp::vectorise(out), msp::vectorise(e)) <
          1e-13);
  }
  SUBCASE("conserves the l2 norm") {
    const msp::PropagatorKernel k = msp::make_propagator(g, 2.5e-12, 4e-9);
    const ComplexGrid out = msp::propagate(e, k);
    CHECK(msp::l2_norm(out.data()) ==
          doctest::Approx(msp::l2_norm(e.data())).epsilon(1e-12));
  }
  SUBCASE("matches the dense operator oracle") {
    const msp::PropagatorKernel k = msp::make_propagator(g, 2.5e-12, 2e-9);
    const msp::DenseComplexMatrix dense = oracle::dense_propagator(k);
    const ComplexVector expected = msp::matvec(dense, msp::vectorise(e));
    const ComplexVector got = msp::vectorise(msp::propagate(e, k));
    CHECK(oracle::relative_l2_difference(got, expected) < 1e-11);
  }
  SUBCASE("distances compose additively at zero tilt") {
    const msp::PropagatorKernel k1 = msp::make_propagator(g, 2.5e-12, 1.5e-9);
    const msp::PropagatorKernel k2 = msp::make_propagator(g, 2.5e-12, 2.5e-9);
    const msp::PropagatorKernel k12 = msp::make_propagator(g, 2.5e-12, 4.0e-9);
    const ComplexVector chained =
        msp::vectorise(msp::propagate(msp::propagate(e, k1), k2));
    const ComplexVector direct = msp::vectorise(msp::propagate(e, k12));
    CHECK(oracle::relative_l2_difference(chained, direct) < 1e-11);
  }
  SUBCASE("adjoint propagation inverts the kernel") {
    const msp::PropagatorKernel k = msp::make_propagator(g, 2.5e-12, 3e-9);
    ComplexVector forward(e.size()), back(e.size());
    msp::propagate_span(e.data(), forward, k);
    msp::propagate_span(forward, back, k, /*adjoint=*/true);
    CHECK(oracle::relative_l2_difference(back, msp::vectorise(e)) < 1e-12);
  }
  SUBCASE("size mismatch throws") {
    const msp::PropagatorKernel k = msp::make_propagator(geom(8, 0.05e-9), 2.5e-12, 1e-9);
    CHECK_THROWS_AS(msp::propagate(e, k), msp::DimensionMismatch);
  }
}
