#pragma once

#include <cstdint>
#include <vector>

#include "msp/physics.hpp"
#include "msp/types.hpp"

namespace msp {

class UnknownCrystal : public std::invalid_argument {
public:
  explicit UnknownCrystal(const std::string& what) : std::invalid_argument(what) {}
};

class GeometryTooCoarse : public std::invalid_argument {
public:
  explicit GeometryTooCoarse(const std::string& what) : std::invalid_argument(what) {}
};

/// One projected atom column: fractional in-cell position, the slice it is
/// assigned to, and the Gaussian phase bump it contributes.
struct AtomSite {
  double frac_x = 0.0;
  double frac_y = 0.0;
  int slice = 0;
  double strength = 0.0;  // peak phase in rad
  double width = 0.0;     // Gaussian sigma in m
};

struct CrystalSpec {
  std::string name;
  std::array<double, 3> unit_cell{0.0, 0.0, 0.0};  // (a, b, c) in m
  std::array<int, 2> supercell{1, 1};              // (Na, Nb) repetitions
  std::vector<AtomSite> atom_sites;
  int slices_per_cell = 1;
  double fresnel_distance = 0.0;  // per-slice propagation step in m
};

struct SliceStack {
  std::vector<ComplexGrid> slices;   // the phase gratings X_m
  std::vector<double> distances;     // M-1 inter-slice Fresnel distances, m
  SamplingGeometry geom;

  int slice_count() const { return static_cast<int>(slices.size()); }
};

/// Built-in toy crystals: GaAs, SrTiO3, MoS2. Lattice parameters, supercell
/// and per-slice Fresnel distances follow the conventional literature values;
/// the site lists are a documented projection of the conventional-cell motifs
/// into three slices per cell, not a full structure model. MoS2 uses its
/// orthogonal-cell setting. Site strengths are given for 200 kV and rescaled
/// by the interaction-constant ratio at other voltages.
CrystalSpec builtin_crystal(const std::string& name, double voltage_volts = 200e3);

/// Rasterise the spec onto the grid: per slice a real phase field
/// phi(y,x) = sum_sites strength * exp(-d^2 / (2 sigma^2)) with wrapped
/// periodic distance d, then X = exp(i phi). Throws GeometryTooCoarse when
/// pixel_size exceeds the sigma of any site.
SliceStack render_slices(const CrystalSpec& spec, const SamplingGeometry& geom,
                         int n_cells_depth);

/// Deterministic smooth random unit-modulus gratings with |phase| bounded by
/// phase_scale. Same seed, same stack, bit for bit.
SliceStack random_phantom(const SamplingGeometry& geom, int m, double phase_scale,
                          std::uint64_t seed, double fresnel_distance = 0.0);

}  // namespace msp
