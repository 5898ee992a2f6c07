#include "msp/specimen.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace msp {

namespace {

constexpr double nm = 1e-9;

// Toy per-species Gaussian bump parameters at 200 kV: peak phase (rad) and
// column width sigma (m). Chosen so the heaviest columns stay well below a
// radian and the presets remain resolvable at n = 16 over a 2x2 supercell.
struct Species {
  double strength;
  double width;
};

constexpr Species kGa{0.155, 0.080 * nm};
constexpr Species kAs{0.165, 0.080 * nm};
constexpr Species kSr{0.175, 0.080 * nm};
constexpr Species kTi{0.115, 0.075 * nm};
constexpr Species kO{0.050, 0.070 * nm};
constexpr Species kMo{0.180, 0.080 * nm};
constexpr Species kS{0.085, 0.075 * nm};

AtomSite site(double fx, double fy, int slice, const Species& sp, double ratio) {
  return AtomSite{fx, fy, slice, sp.strength * ratio, sp.width};
}

}  // namespace

CrystalSpec builtin_crystal(const std::string& name, double voltage_volts) {
  // Phase strengths scale with the relativistic interaction constant; the
  // tabulated values are for 200 kV.
  const double ratio =
      interaction_constant(voltage_volts) / interaction_constant(200e3);

  CrystalSpec spec;
  spec.name = name;
  spec.supercell = {2, 2};
  spec.slices_per_cell = 3;

  if (name == "GaAs") {
    // Zincblende conventional cell, sites bucketed by z into three slices.
    spec.unit_cell = {0.56533 * nm, 0.56533 * nm, 0.56533 * nm};
    spec.fresnel_distance = 0.1413 * nm;
    spec.atom_sites = {
        site(0.00, 0.00, 0, kGa, ratio), site(0.50, 0.50, 0, kGa, ratio),
        site(0.25, 0.25, 0, kAs, ratio), site(0.75, 0.75, 0, kAs, ratio),
        site(0.50, 0.00, 1, kGa, ratio), site(0.00, 0.50, 1, kGa, ratio),
        site(0.75, 0.25, 2, kAs, ratio), site(0.25, 0.75, 2, kAs, ratio),
    };
  } else if (name == "SrTiO3") {
    // Cubic perovskite; the third slice of the cell carries no sites.
    spec.unit_cell = {0.3905 * nm, 0.3905 * nm, 0.3905 * nm};
    spec.fresnel_distance = 0.1952 * nm;
    spec.atom_sites = {
        site(0.00, 0.00, 0, kSr, ratio), site(0.50, 0.50, 0, kO, ratio),
        site(0.50, 0.50, 1, kTi, ratio), site(0.50, 0.00, 1, kO, ratio),
        site(0.00, 0.50, 1, kO, ratio),
    };
  } else if (name == "MoS2") {
    // 2H polytype in the orthogonal-cell setting; the S-Mo-S sandwich of each
    // monolayer is spread over the three slices.
    spec.unit_cell = {0.3161 * nm, 0.54750 * nm, 1.2295 * nm};
    spec.fresnel_distance = 0.1561 * nm;
    spec.atom_sites = {
        site(0.00, 2.0 / 3.0, 0, kS, ratio),  site(0.50, 1.0 / 6.0, 0, kS, ratio),
        site(0.00, 1.0 / 3.0, 0, kMo, ratio), site(0.50, 5.0 / 6.0, 0, kMo, ratio),
        site(0.00, 2.0 / 3.0, 1, kS, ratio),  site(0.50, 1.0 / 6.0, 1, kS, ratio),
        site(0.00, 1.0 / 3.0, 1, kS, ratio),  site(0.50, 5.0 / 6.0, 1, kS, ratio),
        site(0.00, 2.0 / 3.0, 2, kMo, ratio), site(0.50, 1.0 / 6.0, 2, kMo, ratio),
        site(0.00, 1.0 / 3.0, 2, kS, ratio),  site(0.50, 5.0 / 6.0, 2, kS, ratio),
    };
  } else {
    throw UnknownCrystal("builtin_crystal: unknown crystal '" + name + "'");
  }
  return spec;
}

SliceStack render_slices(const CrystalSpec& spec, const SamplingGeometry& geom,
                         int n_cells_depth) {
  if (n_cells_depth < 1)
    throw std::invalid_argument("render_slices: n_cells_depth must be >= 1");
  const double extent = geom.n * geom.pixel_size;
  const double cell_x = spec.supercell[0] * spec.unit_cell[0];
  const double cell_y = spec.supercell[1] * spec.unit_cell[1];
  if (extent + 1e-15 < cell_x || extent + 1e-15 < cell_y)
    throw std::invalid_argument(
        "render_slices: grid extent does not cover the supercell");
  for (const AtomSite& s : spec.atom_sites)
    if (geom.pixel_size > s.width)
      throw GeometryTooCoarse(
          "render_slices: pixel size exceeds the width of a site (undersampled atoms)");

  SliceStack stack;
  stack.geom = geom;
  const int total = spec.slices_per_cell * n_cells_depth;
  stack.slices.reserve(total);

  auto wrapped_dist = [extent](double d) {
    d = std::remainder(d, extent);
    return d;
  };

  for (int m = 0; m < total; ++m) {
    const int motif_slice = m % spec.slices_per_cell;
    std::vector<double> phase(static_cast<std::size_t>(geom.n) * geom.n, 0.0);
    for (const AtomSite& s : spec.atom_sites) {
      if (s.slice != motif_slice) continue;
      const double inv2s2 = 1.0 / (2.0 * s.width * s.width);
      for (int ia = 0; ia < spec.supercell[0]; ++ia) {
        for (int ib = 0; ib < spec.supercell[1]; ++ib) {
          const double sx = (ia + s.frac_x) * spec.unit_cell[0];
          const double sy = (ib + s.frac_y) * spec.unit_cell[1];
          for (int y = 0; y < geom.n; ++y) {
            const double dy = wrapped_dist(y * geom.pixel_size - sy);
            for (int x = 0; x < geom.n; ++x) {
              const double dx = wrapped_dist(x * geom.pixel_size - sx);
              phase[static_cast<std::size_t>(y) * geom.n + x] +=
                  s.strength * std::exp(-(dx * dx + dy * dy) * inv2s2);
            }
          }
        }
      }
    }
    ComplexGrid grating(geom.n);
    auto out = grating.data();
    for (std::size_t i = 0; i < phase.size(); ++i)
      out[i] = std::polar(1.0, phase[i]);
    stack.slices.push_back(std::move(grating));
  }
  stack.distances.assign(total > 0 ? total - 1 : 0, spec.fresnel_distance);
  return stack;
}

SliceStack random_phantom(const SamplingGeometry& geom, int m, double phase_scale,
                          std::uint64_t seed, double fresnel_distance) {
  if (m < 1) throw std::invalid_argument("random_phantom: slice count must be >= 1");
  if (phase_scale < 0.0)
    throw std::invalid_argument("random_phantom: phase_scale must be >= 0");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double two_pi = 2.0 * std::numbers::pi;

  SliceStack stack;
  stack.geom = geom;
  stack.slices.reserve(m);
  for (int s = 0; s < m; ++s) {
    // A handful of low-order Fourier modes gives a smooth periodic field.
    std::vector<double> phase(static_cast<std::size_t>(geom.n) * geom.n, 0.0);
    for (int mode = 0; mode < 6; ++mode) {
      const int ky = static_cast<int>(unit(rng) * 5.0) - 2;
      const int kx = static_cast<int>(unit(rng) * 5.0) - 2;
      const double amp = unit(rng);
      const double theta = two_pi * unit(rng);
      for (int y = 0; y < geom.n; ++y)
        for (int x = 0; x < geom.n; ++x)
          phase[static_cast<std::size_t>(y) * geom.n + x] +=
              amp * std::cos(two_pi * (ky * y + kx * x) / geom.n + theta);
    }
    double peak = 0.0;
    for (double v : phase) peak = std::max(peak, std::abs(v));
    const double scale = (phase_scale > 0.0 && peak > 0.0) ? phase_scale / peak : 0.0;
    ComplexGrid grating(geom.n);
    auto out = grating.data();
    for (std::size_t i = 0; i < phase.size(); ++i)
      out[i] = std::polar(1.0, scale * phase[i]);
    stack.slices.push_back(std::move(grating));
  }
  stack.distances.assign(m - 1, fresnel_distance);
  return stack;
}

}  // namespace msp
