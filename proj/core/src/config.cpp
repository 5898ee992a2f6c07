#include "msp/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

namespace msp {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: field '" + key + "' expects a number, got '" +
                      value + "'");
  }
}

long parse_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: field '" + key + "' expects an integer, got '" +
                      value + "'");
  }
}

}  // namespace

bool supported_grid_side(int n) {
  static constexpr std::array<int, 7> sides{8, 16, 32, 40, 64, 128, 256};
  return std::find(sides.begin(), sides.end(), n) != sides.end();
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) +
                        " is not a key=value pair: '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "specimen.kind") config.specimen_kind = value;
    else if (key == "specimen.crystal") config.crystal = value;
    else if (key == "specimen.depth_cells")
      config.depth_cells = static_cast<int>(parse_integer(key, value));
    else if (key == "phantom.slices")
      config.phantom_slices = static_cast<int>(parse_integer(key, value));
    else if (key == "phantom.phase_scale_rad")
      config.phantom_phase_scale = parse_double(key, value);
    else if (key == "phantom.seed")
      config.phantom_seed = static_cast<std::uint64_t>(parse_integer(key, value));
    else if (key == "phantom.fresnel_nm")
      config.phantom_fresnel_m = parse_double(key, value) * 1e-9;
    else if (key == "geometry.n")
      config.n = static_cast<int>(parse_integer(key, value));
    else if (key == "geometry.pixel_size_nm")
      config.pixel_size_m = parse_double(key, value) * 1e-9;
    else if (key == "beam.voltage_kv")
      config.voltage_volts = parse_double(key, value) * 1e3;
    else if (key == "beam.semiconv_mrad")
      config.semiconv_rad = parse_double(key, value) * 1e-3;
    else if (key == "scan.ny")
      config.scan_ny = static_cast<int>(parse_integer(key, value));
    else if (key == "scan.nx")
      config.scan_nx = static_cast<int>(parse_integer(key, value));
    else if (key == "scan.step_px")
      config.scan_step = static_cast<int>(parse_integer(key, value));
    else if (key == "inversion.slices")
      config.inv_slices = static_cast<int>(parse_integer(key, value));
    else if (key == "inversion.fresnel_nm")
      config.inv_fresnel_m = parse_double(key, value) * 1e-9;
    else if (key == "solver.outer_iters")
      config.outer_iters = static_cast<int>(parse_integer(key, value));
    else if (key == "solver.gradient_steps")
      config.gradient_steps = static_cast<int>(parse_integer(key, value));
    else if (key == "solver.stop_tol")
      config.stop_tol = parse_double(key, value);
    else if (key == "solver.safety")
      config.safety = parse_double(key, value);
    else if (key == "solver.seed")
      config.seed = static_cast<std::uint64_t>(parse_integer(key, value));
    else if (key == "io.dataset") config.dataset_path = value;
    else if (key == "io.truth") config.truth_path = value;
    else
      throw ConfigError("config: unknown field '" + key + "' at line " +
                        std::to_string(line_no));
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

void validate(const RunConfig& config) {
  if (!supported_grid_side(config.n))
    throw ConfigError(
        "config: field 'geometry.n' must be one of 8, 16, 32, 40, 64, 128, 256; got " +
        std::to_string(config.n));
  if (config.specimen_kind != "crystal" && config.specimen_kind != "phantom" &&
      config.specimen_kind != "vacuum")
    throw ConfigError("config: field 'specimen.kind' must be crystal, phantom or "
                      "vacuum; got '" + config.specimen_kind + "'");
  if (config.pixel_size_m && *config.pixel_size_m <= 0.0)
    throw ConfigError("config: field 'geometry.pixel_size_nm' must be positive");
  if (config.specimen_kind != "crystal" && !config.pixel_size_m)
    throw ConfigError(
        "config: field 'geometry.pixel_size_nm' is required unless "
        "specimen.kind=crystal");
  if (config.voltage_volts <= 0.0)
    throw ConfigError("config: field 'beam.voltage_kv' must be positive");
  if (config.semiconv_rad <= 0.0)
    throw ConfigError("config: field 'beam.semiconv_mrad' must be positive");
  if (config.scan_ny < 1 || config.scan_nx < 1)
    throw ConfigError("config: fields 'scan.ny'/'scan.nx' must be >= 1");
  if (config.scan_step < 1)
    throw ConfigError("config: field 'scan.step_px' must be >= 1");
  if (config.depth_cells < 1)
    throw ConfigError("config: field 'specimen.depth_cells' must be >= 1");
  if (config.phantom_slices < 1)
    throw ConfigError("config: field 'phantom.slices' must be >= 1");
  if (config.phantom_phase_scale < 0.0)
    throw ConfigError("config: field 'phantom.phase_scale_rad' must be >= 0");
  if (config.inv_slices < 1)
    throw ConfigError("config: field 'inversion.slices' must be >= 1");
  if (config.inv_fresnel_m < 0.0)
    throw ConfigError("config: field 'inversion.fresnel_nm' must be >= 0");
  if (config.outer_iters < 0)
    throw ConfigError("config: field 'solver.outer_iters' must be >= 0");
  if (config.gradient_steps < 1)
    throw ConfigError("config: field 'solver.gradient_steps' must be >= 1");
  if (config.stop_tol < 0.0)
    throw ConfigError("config: field 'solver.stop_tol' must be >= 0");
  if (config.safety <= 0.0 || config.safety > 1.0)
    throw ConfigError("config: field 'solver.safety' must be in (0, 1]");
  if (config.dataset_path == config.truth_path)
    throw ConfigError("config: fields 'io.dataset' and 'io.truth' must name "
                      "distinct paths");
}

}  // namespace msp
