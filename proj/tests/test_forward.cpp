#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "msp/dft.hpp"
#include "msp/forward.hpp"
#include "support/oracles.hpp"

using msp::cplx;
using msp::ComplexGrid;
using msp::ComplexVector;

namespace {

constexpr double nm = 1e-9;

msp::SliceStack stack_from_diagonals(const std::vector<ComplexVector>& diags,
                                     const msp::SamplingGeometry& geom,
                                     double distance) {
  msp::SliceStack stack;
  stack.geom = geom;
  for (const ComplexVector& d : diags)
    stack.slices.emplace_back(geom.n, d);
  stack.distances.assign(diags.size() > 0 ? diags.size() - 1 : 0, distance);
  return stack;
}

}  // namespace

TEST_CASE("multislice_exit_wave") {
  const msp::SamplingGeometry geom{8, 0.05 * nm};
  const msp::BeamParameters beam = msp::make_beam(200e3, 32e-3);
  const ComplexGrid probe = msp::make_probe(beam, geom);

  SUBCASE("vacuum slices with zero distance return the probe") {
    const std::size_t dim = probe.size();
    msp::SliceStack stack = stack_from_diagonals(
        {ComplexVector(dim, 1.0), ComplexVector(dim, 1.0), ComplexVector(dim, 1.0)},
        geom, 0.0);
    const auto kernels = msp::make_stack_kernels(stack, beam.wavelength);
    const ComplexGrid exit = msp::multislice_exit_wave(probe, stack, kernels);
    CHECK(oracle::relative_l2_difference(msp::vectorise(exit),
                                         msp::vectorise(probe)) < 1e-12);
  }
  SUBCASE("a single slice is the plain elementwise product") {
    msp::SliceStack stack = stack_from_diagonals(
        {oracle::random_unit_diagonals(geom.n, 1, 3)[0]}, geom, 0.0);
    const auto kernels = msp::make_stack_kernels(stack, beam.wavelength);
    const ComplexGrid exit = msp::multislice_exit_wave(probe, stack, kernels);
    const ComplexVector expected = msp::hadamard_as_diag(probe, stack.slices[0]);
    CHECK(oracle::max_abs_difference(msp::vectorise(exit), expected) == 0.0);
  }
  SUBCASE("three slices match the dense operator-form oracle") {
    const auto diags = oracle::random_unit_diagonals(geom.n, 3, 17);
    msp::SliceStack stack = stack_from_diagonals(diags, geom, 2.0 * nm);
    const auto kernels = msp::make_stack_kernels(stack, beam.wavelength);

    const msp::DenseComplexMatrix dense =
        oracle::dense_stack_matrix(diags, kernels);
    const ComplexVector expected = msp::matvec(dense, msp::vectorise(probe));
    const ComplexVector got =
        msp::vectorise(msp::multislice_exit_wave(probe, stack, kernels));
    CHECK(oracle::relative_l2_difference(got, expected) < 1e-11);
  }
}

TEST_CASE("intensity") {
  SUBCASE("a delta exit wave gives the uniform unit pattern") {
    ComplexGrid delta(4);
    delta(0, 0) = 1.0;
    for (double v : msp::intensity(delta)) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("the zero wave gives zero intensity") {
    for (double v : msp::intensity(ComplexGrid(4))) CHECK(v == 0.0);
  }
  SUBCASE("total intensity is n^2 times the wave energy") {
    const ComplexGrid e = oracle::random_grid(4, 23);
    double total = 0.0;
    for (double v : msp::intensity(e)) total += v;
    const double energy = msp::l2_norm(e.data()) * msp::l2_norm(e.data());
    CHECK(total == doctest::Approx(16.0 * energy).epsilon(1e-12));
  }
}

TEST_CASE("simulate_dataset") {
  const msp::SamplingGeometry geom{8, 0.05 * nm};
  const msp::BeamParameters beam = msp::make_beam(200e3, 32e-3);

  SUBCASE("vacuum stack gives identical patterns at every position") {
    msp::SliceStack stack = stack_from_diagonals(
        {ComplexVector(64, 1.0), ComplexVector(64, 1.0)}, geom, 1.5 * nm);
    const msp::ScanPlan scan = msp::raster_scan(2, 2, 3, geom.n);
    const msp::Dataset4D data = msp::simulate_dataset(stack, beam, geom, scan);
    REQUIRE(data.intensities.size() == 4);
    for (std::size_t s = 1; s < 4; ++s)
      for (std::size_t k = 0; k < 64; ++k)
        CHECK(data.intensities[s][k] ==
              doctest::Approx(data.intensities[0][k]).epsilon(1e-10));
  }
  SUBCASE("a single-position scan matches the direct composition") {
    msp::SliceStack stack = stack_from_diagonals(
        oracle::random_unit_diagonals(geom.n, 2, 5), geom, 2.0 * nm);
    msp::ScanPlan scan;
    scan.positions = {{3, 2}};
    const msp::Dataset4D data = msp::simulate_dataset(stack, beam, geom, scan);
    const auto kernels = msp::make_stack_kernels(stack, beam.wavelength);
    const ComplexGrid probe = msp::shift_probe(msp::make_probe(beam, geom), 3, 2);
    const msp::RealGrid expected =
        msp::intensity(msp::multislice_exit_wave(probe, stack, kernels));
    for (std::size_t k = 0; k < expected.size(); ++k)
      CHECK(data.intensities[0][k] == expected[k]);
  }
  SUBCASE("reruns are bit-identical and threads do not change the result") {
    const msp::CrystalSpec spec = msp::builtin_crystal("GaAs");
    const double pixel = 2.0 * 0.56533 * nm / 16;
    const msp::SliceStack stack = msp::render_slices(spec, {16, pixel}, 1);
    const msp::ScanPlan scan = msp::raster_scan(3, 3, 2, 16);
    const msp::Dataset4D a =
        msp::simulate_dataset(stack, beam, {16, pixel}, scan, 1);
    const msp::Dataset4D b =
        msp::simulate_dataset(stack, beam, {16, pixel}, scan, 4);
    for (std::size_t s = 0; s < a.intensities.size(); ++s)
      for (std::size_t k = 0; k < a.intensities[s].size(); ++k)
        CHECK(a.intensities[s][k] == b.intensities[s][k]);
  }
}

TEST_CASE("assemble_scattering_matrix") {
  const msp::SamplingGeometry geom{4, 0.05 * nm};
  const msp::BeamParameters beam = msp::make_beam(200e3, 32e-3);

  SUBCASE("vacuum stack with zero distance assembles the identity") {
    msp::SliceStack stack = stack_from_diagonals(
        {ComplexVector(16, 1.0), ComplexVector(16, 1.0)}, geom, 0.0);
    const msp::ScatteringMatrix a =
        msp::assemble_scattering_matrix(stack, geom, beam);
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = 0; j < 16; ++j)
        CHECK(std::abs(a.a.at(i, j) - (i == j ? cplx{1.0} : cplx{})) < 1e-13);
  }
  SUBCASE("a single slice assembles its diagonal") {
    const auto diags = oracle::random_unit_diagonals(geom.n, 1, 9);
    msp::SliceStack stack = stack_from_diagonals(diags, geom, 0.0);
    const msp::ScatteringMatrix a =
        msp::assemble_scattering_matrix(stack, geom, beam);
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = 0; j < 16; ++j)
        CHECK(std::abs(a.a.at(i, j) - (i == j ? diags[0][i] : cplx{})) < 1e-14);
  }
  SUBCASE("two slices match the dense factor-product oracle") {
    const auto diags = oracle::random_unit_diagonals(geom.n, 2, 31);
    msp::SliceStack stack = stack_from_diagonals(diags, geom, 3.0 * nm);
    const auto kernels = msp::make_stack_kernels(stack, beam.wavelength);
    const msp::ScatteringMatrix a =
        msp::assemble_scattering_matrix(stack, geom, beam);
    const msp::DenseComplexMatrix dense = oracle::dense_stack_matrix(diags, kernels);
    for (std::size_t i = 0; i < a.a.data.size(); ++i)
      CHECK(std::abs(a.a.data[i] - dense.data[i]) < 1e-11);
  }
  SUBCASE("the size guard trips above n = 64 unless overridden") {
    msp::SliceStack stack;
    stack.geom = {128, 0.01 * nm};
    stack.slices.emplace_back(128);
    CHECK_THROWS_AS(
        msp::assemble_scattering_matrix(stack, {128, 0.01 * nm}, beam),
        msp::TooLarge);
  }
}

TEST_CASE("apply_scattering") {
  SUBCASE("identity matrix returns the input") {
    msp::ScatteringMatrix a{msp::DenseComplexMatrix::identity(16)};
    const ComplexVector v = oracle::random_vector(16, 2);
    CHECK(oracle::max_abs_difference(msp::apply_scattering(a, v), v) == 0.0);
  }
  SUBCASE("zero vector maps to zero") {
    msp::ScatteringMatrix a{oracle::random_matrix(16, 16, 3)};
    for (const cplx& z : msp::apply_scattering(a, ComplexVector(16)))
      CHECK(z == cplx{});
  }
  SUBCASE("random matrix-vector product matches the naive triple loop") {
    msp::ScatteringMatrix a{oracle::random_matrix(16, 16, 4)};
    const ComplexVector v = oracle::random_vector(16, 5);
    ComplexVector expected(16);
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = 0; j < 16; ++j) expected[i] += a.a.at(i, j) * v[j];
    CHECK(oracle::max_abs_difference(msp::apply_scattering(a, v), expected) < 1e-13);
  }
}

TEST_CASE("forward equivalence: recursion vs operator form") {
  const msp::BeamParameters beam = msp::make_beam(200e3, 32e-3);
  int checked = 0;
  for (int n : {4, 8}) {
    for (int m : {1, 2, 3}) {
      const msp::SamplingGeometry geom{n, 0.05 * nm};
      const auto diags = oracle::random_unit_diagonals(n, m, 100 + n * 10 + m);
      msp::SliceStack stack = stack_from_diagonals(diags, geom, 1.7 * nm);
      const msp::ScatteringMatrix a =
          msp::assemble_scattering_matrix(stack, geom, beam);
      const msp::ScanPlan scan = msp::raster_scan(2, 2, 1, n);
      const msp::Dataset4D data = msp::simulate_dataset(stack, beam, geom, scan);
      const auto probes = msp::resolve_probes(msp::make_probe(beam, geom), scan);
      for (std::size_t s = 0; s < probes.size(); ++s) {
        const ComplexVector exit = msp::apply_scattering(a, probes[s]);
        ComplexVector spectrum(exit.size());
        msp::dft2_forward_span(exit, spectrum, n);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < exit.size(); ++k) {
          const double d = std::norm(spectrum[k]) - data.intensities[s][k];
          num += d * d;
          den += data.intensities[s][k] * data.intensities[s][k];
        }
        CHECK(std::sqrt(num / den) < 1e-10);
        ++checked;
      }
    }
  }
  CHECK(checked == 2 * 3 * 4);
}

TEST_CASE("energy conservation and unitarity for unit-modulus stacks") {
  const msp::BeamParameters beam = msp::make_beam(200e3, 32e-3);
  const int n = 4;
  const msp::SamplingGeometry geom{n, 0.05 * nm};
  const auto diags = oracle::random_unit_diagonals(n, 3, 55);
  msp::SliceStack stack = stack_from_diagonals(diags, geom, 2.2 * nm);

  SUBCASE("total intensity is n^2 ||p||^2 at every scan position") {
    const msp::ScanPlan scan = msp::raster_scan(2, 2, 1, n);
    const msp::Dataset4D data = msp::simulate_dataset(stack, beam, geom, scan);
    const auto probes = msp::resolve_probes(msp::make_probe(beam, geom), scan);
    for (std::size_t s = 0; s < probes.size(); ++s) {
      double total = 0.0;
      for (double v : data.intensities[s]) total += v;
      const double energy = msp::l2_norm(probes[s]) * msp::l2_norm(probes[s]);
      CHECK(total == doctest::Approx(n * n * energy).epsilon(1e-11));
    }
  }
  SUBCASE("A^H A is the identity") {
    const msp::ScatteringMatrix a =
        msp::assemble_scattering_matrix(stack, geom, beam);
    double off = 0.0;
    for (std::size_t i = 0; i < a.a.rows; ++i)
      for (std::size_t j = 0; j < a.a.cols; ++j) {
        cplx sum = 0.0;
        for (std::size_t k = 0; k < a.a.rows; ++k)
          sum += std::conj(a.a.at(k, i)) * a.a.at(k, j);
        if (i == j) sum -= 1.0;
        off += std::norm(sum);
      }
    CHECK(std::sqrt(off) <= 1e-9 * n * n);
  }
}

TEST_CASE("rescaling slices with product-one multipliers keeps A_M") {
  const msp::BeamParameters beam = msp::make_beam(200e3, 32e-3);
  const int n = 4;
  const msp::SamplingGeometry geom{n, 0.05 * nm};
  auto diags = oracle::random_unit_diagonals(n, 3, 77);
  msp::SliceStack stack = stack_from_diagonals(diags, geom, 2.0 * nm);
  const msp::ScatteringMatrix a = msp::assemble_scattering_matrix(stack, geom, beam);

  const cplx alpha0 = std::polar(1.7, 0.3);
  const cplx alpha1 = std::polar(0.4, -1.1);
  const cplx alpha2 = 1.0 / (alpha0 * alpha1);
  for (auto& z : diags[0]) z *= alpha0;
  for (auto& z : diags[1]) z *= alpha1;
  for (auto& z : diags[2]) z *= alpha2;
  msp::SliceStack scaled = stack_from_diagonals(diags, geom, 2.0 * nm);
  const msp::ScatteringMatrix b = msp::assemble_scattering_matrix(scaled, geom, beam);

  for (std::size_t i = 0; i < a.a.data.size(); ++i)
    CHECK(std::abs(a.a.data[i] - b.a.data[i]) <= 1e-12);
}
