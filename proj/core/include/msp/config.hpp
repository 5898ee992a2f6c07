#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "msp/types.hpp"

namespace msp {

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Run description parsed from a line-based key=value file with dotted
/// section prefixes ('#' starts a comment). See the README for the key list.
struct RunConfig {
  // specimen
  std::string specimen_kind = "crystal";  // crystal | phantom | vacuum
  std::string crystal = "GaAs";
  int depth_cells = 1;
  int phantom_slices = 1;
  double phantom_phase_scale = 0.1;    // rad
  std::uint64_t phantom_seed = 7;
  double phantom_fresnel_m = 2e-9;

  // geometry
  int n = 16;
  std::optional<double> pixel_size_m;  // crystals default to supercell/n

  // beam
  double voltage_volts = 200e3;
  double semiconv_rad = 32e-3;

  // scan
  int scan_ny = 3;
  int scan_nx = 3;
  int scan_step = 2;

  // inversion
  int inv_slices = 1;
  double inv_fresnel_m = 2e-9;

  // solver
  int outer_iters = 30;
  int gradient_steps = 20;
  double stop_tol = 1e-6;
  double safety = 1.0;
  std::uint64_t seed = 1;

  // paths (relative entries are resolved against the output directory)
  std::string dataset_path = "dataset.ms4d";
  std::string truth_path = "truth.ms4g";
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError naming the offending field when an invariant fails
/// (supported n, positive sizes, distinct paths, inversion M >= 1, ...).
void validate(const RunConfig& config);

/// Grid sides the numerics layer commits to supporting.
bool supported_grid_side(int n);

}  // namespace msp
