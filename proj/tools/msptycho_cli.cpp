// Command-line workflows: simulate, reconstruct-layerwise, reconstruct-sparse,
// reconstruct-probe, ingest, metrics. Exit codes: 0 ok, 2 config error,
// 3 data error, 4 solver hard failure.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "msp/config.hpp"
#include "msp/dft.hpp"
#include "msp/io.hpp"
#include "msp/metrics.hpp"
#include "msp/solvers.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitSolver = 4;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::int64_t> seed;
  int threads = 1;
  bool debug_truth_a = false;
};

double resolve_pixel(const msp::RunConfig& config) {
  if (config.pixel_size_m) return *config.pixel_size_m;
  const msp::CrystalSpec spec =
      msp::builtin_crystal(config.crystal, config.voltage_volts);
  return spec.supercell[0] * spec.unit_cell[0] / config.n;
}

msp::SliceStack build_stack(const msp::RunConfig& config,
                            const msp::SamplingGeometry& geom) {
  if (config.specimen_kind == "crystal") {
    const msp::CrystalSpec spec =
        msp::builtin_crystal(config.crystal, config.voltage_volts);
    return msp::render_slices(spec, geom, config.depth_cells);
  }
  const double scale =
      config.specimen_kind == "vacuum" ? 0.0 : config.phantom_phase_scale;
  return msp::random_phantom(geom, config.phantom_slices, scale,
                             config.phantom_seed, config.phantom_fresnel_m);
}

msp::SolverConfig solver_config(const msp::RunConfig& config,
                                const CommonOptions& opts) {
  msp::SolverConfig cfg;
  cfg.outer_iters = config.outer_iters;
  cfg.inner_gradient_steps = config.gradient_steps;
  cfg.stop_tol = config.stop_tol;
  cfg.learning_rate_safety = config.safety;
  cfg.seed = opts.seed ? static_cast<std::uint64_t>(*opts.seed) : config.seed;
  return cfg;
}

fs::path resolve(const std::string& out_dir, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? p : fs::path(out_dir) / p;
}

int run_simulate(const CommonOptions& opts) {
  msp::RunConfig config = msp::load_config(opts.config_path);
  if (opts.seed) config.phantom_seed = static_cast<std::uint64_t>(*opts.seed);
  msp::validate(config);

  const msp::SamplingGeometry geom{config.n, resolve_pixel(config)};
  const msp::BeamParameters beam =
      msp::make_beam(config.voltage_volts, config.semiconv_rad);
  const msp::SliceStack stack = build_stack(config, geom);
  const msp::ScanPlan scan =
      msp::raster_scan(config.scan_ny, config.scan_nx, config.scan_step, geom.n);

  const msp::Dataset4D data =
      msp::simulate_dataset(stack, beam, geom, scan, opts.threads);

  fs::create_directories(opts.out_dir);
  const fs::path dataset_path = resolve(opts.out_dir, config.dataset_path);
  msp::write_ms4d(dataset_path,
                  msp::container_from_dataset(data, config.scan_ny, config.scan_nx));

  msp::TruthSidecar truth;
  truth.n = static_cast<std::uint32_t>(geom.n);
  truth.slice_count = static_cast<std::uint32_t>(stack.slices.size());
  truth.fresnel_distance_m = stack.distances.empty() ? 0.0 : stack.distances.front();
  truth.probe = msp::vectorise(msp::make_probe(beam, geom));
  for (const msp::ComplexGrid& s : stack.slices)
    truth.slices.push_back(msp::vectorise(s));
  msp::write_truth(resolve(opts.out_dir, config.truth_path), truth);

  double total = 0.0;
  for (const msp::RealGrid& pattern : data.intensities)
    for (double v : pattern) total += v;
  std::cout << "simulated S=" << scan.count() << " N=" << geom.n
            << " M=" << stack.slices.size() << " total_intensity=" << total
            << " -> " << dataset_path.string() << '\n';
  return kExitOk;
}

struct LoadedRun {
  msp::RunConfig config;
  msp::Dataset4D data;
  std::vector<msp::ComplexVector> probes;
  std::vector<msp::PropagatorKernel> kernels;  // inversion propagators
  std::optional<msp::TruthSidecar> truth;
};

LoadedRun load_run(const CommonOptions& opts) {
  LoadedRun run;
  run.config = msp::load_config(opts.config_path);
  msp::validate(run.config);

  const fs::path dataset_path = resolve(opts.out_dir, run.config.dataset_path);
  const msp::MS4DContainer container = msp::read_ms4d(dataset_path);
  if (static_cast<int>(container.n) != run.config.n)
    throw msp::DataError("grid size mismatch: config geometry.n=" +
                         std::to_string(run.config.n) + " but container has n=" +
                         std::to_string(container.n));
  if (static_cast<int>(container.scan_y) != run.config.scan_ny ||
      static_cast<int>(container.scan_x) != run.config.scan_nx)
    throw msp::DataError(
        "scan mismatch: config scan " + std::to_string(run.config.scan_ny) + "x" +
        std::to_string(run.config.scan_nx) + " but container has " +
        std::to_string(container.scan_y) + "x" + std::to_string(container.scan_x));

  run.data = msp::dataset_from_container(container, run.config.semiconv_rad,
                                         run.config.scan_step);
  run.probes = msp::resolve_probes(
      msp::make_probe(run.data.beam, run.data.geom), run.data.scan);

  for (int m = 0; m + 1 < run.config.inv_slices; ++m)
    run.kernels.push_back(msp::make_propagator(run.data.geom,
                                               run.data.beam.wavelength,
                                               run.config.inv_fresnel_m));

  const fs::path truth_path = resolve(opts.out_dir, run.config.truth_path);
  if (fs::exists(truth_path)) run.truth = msp::read_truth(truth_path);
  return run;
}

void write_history(const fs::path& path, const std::vector<msp::ErrorReport>& rows,
                   int slice_count) {
  std::ofstream out(path, std::ios::trunc);
  out << msp::error_report_csv_header(slice_count) << '\n';
  for (const msp::ErrorReport& row : rows)
    out << msp::error_report_csv_row(row) << '\n';
}

std::vector<msp::DiagonalOperator> truth_diagonals(const msp::TruthSidecar& truth) {
  std::vector<msp::DiagonalOperator> out;
  out.reserve(truth.slices.size());
  for (const msp::ComplexVector& s : truth.slices) out.push_back({s});
  return out;
}

msp::ErrorReport score_iteration(const msp::ReconstructionState& state,
                                 const LoadedRun& run, int iteration,
                                 double measurement_error) {
  msp::ErrorReport report;
  report.iteration = iteration;
  report.relative_measurement_error = measurement_error;
  if (run.truth &&
      static_cast<int>(run.truth->slice_count) == run.config.inv_slices) {
    const auto truth = truth_diagonals(*run.truth);
    report.relative_reconstruction_error_raw =
        msp::relative_reconstruction_error(truth, state.slices);
    const auto aligned = msp::align_global(state.slices, truth);
    report.relative_reconstruction_error_aligned =
        msp::relative_reconstruction_error(truth, aligned, &report.per_slice_errors);
    report.has_reconstruction_error = true;
  }
  return report;
}

int run_debug_truth(const CommonOptions& opts, const LoadedRun& run) {
  if (!run.truth)
    throw msp::MissingArtifact("--debug-truth-a requires the ground-truth sidecar " +
                               resolve(opts.out_dir, run.config.truth_path).string());
  std::vector<msp::PropagatorKernel> truth_kernels;
  for (std::uint32_t m = 0; m + 1 < run.truth->slice_count; ++m)
    truth_kernels.push_back(msp::make_propagator(
        run.data.geom, run.data.beam.wavelength, run.truth->fresnel_distance_m));
  const msp::ScatteringMatrix a =
      msp::materialise(msp::full_chain(truth_diagonals(*run.truth), truth_kernels));
  const double err = msp::relative_measurement_error(run.data, a, run.probes);

  msp::ErrorReport report;
  report.iteration = 0;
  report.relative_measurement_error = err;
  write_history(fs::path(opts.out_dir) / "history.csv", {report},
                run.config.inv_slices);
  std::cout << "debug-truth-a relative_measurement_error=" << err << '\n';
  return kExitOk;
}

int run_reconstruct(const CommonOptions& opts, bool sparse) {
  const LoadedRun run = load_run(opts);
  fs::create_directories(opts.out_dir);
  if (opts.debug_truth_a) return run_debug_truth(opts, run);

  const msp::SolverConfig cfg = solver_config(run.config, opts);
  msp::ReconstructionState init =
      msp::identity_init(run.data.geom.n, run.config.inv_slices);

  std::vector<msp::ErrorReport> rows;
  rows.push_back(score_iteration(init, run, 0, 0.0));  // error filled in below
  const msp::IterationCallback callback =
      [&](const msp::ReconstructionState& state, int iteration) {
        rows.push_back(score_iteration(state, run, iteration,
                                       state.history.back().measurement_error));
      };

  msp::ReconstructionState state =
      sparse ? msp::sparse_matrix_decomposition(run.data, run.probes, run.kernels,
                                                std::move(init), cfg, callback)
             : msp::layerwise_reconstruct(run.data, run.probes, run.kernels,
                                          std::move(init), cfg, callback);
  rows.front().relative_measurement_error = state.history.front().measurement_error;

  for (const std::string& warning : state.warnings)
    std::cerr << "warning: " << warning << '\n';

  const fs::path out_dir(opts.out_dir);
  for (std::size_t m = 0; m < state.slices.size(); ++m) {
    const std::string stem = "slice_" + std::to_string(m + 1);
    msp::render_phase_map(state.slices[m], run.data.geom.n,
                          out_dir / (stem + ".pgm"), out_dir / (stem + ".csv"));
  }
  write_history(out_dir / "history.csv", rows, run.config.inv_slices);

  msp::StateFile file;
  file.n = static_cast<std::uint32_t>(run.data.geom.n);
  file.fidelity_scale = state.fidelity_scale;
  for (const msp::DiagonalOperator& d : state.slices) file.slices.push_back(d.diag);
  msp::write_state(out_dir / "state.ms4r", file);

  if (sparse && state.a_estimate)
    msp::write_scattering(out_dir / "a_hat.ms4a", *state.a_estimate);

  std::cout << (sparse ? "sparse" : "layerwise")
            << " final relative_measurement_error="
            << state.history.back().measurement_error << " iterations="
            << state.history.back().iteration << '\n';
  return kExitOk;
}

int run_reconstruct_probe(const CommonOptions& opts) {
  const LoadedRun run = load_run(opts);
  const fs::path out_dir(opts.out_dir);
  const msp::ScatteringMatrix a_hat = msp::read_scattering(out_dir / "a_hat.ms4a");
  if (a_hat.a.rows != static_cast<std::size_t>(run.data.geom.n) * run.data.geom.n)
    throw msp::DataError("a_hat.ms4a size does not match the dataset grid");

  // centre of the raster, floor(dims/2) in both axes on even dimensions
  const int cy = run.config.scan_ny / 2;
  const int cx = run.config.scan_nx / 2;
  const std::size_t centre = static_cast<std::size_t>(cy) * run.config.scan_nx + cx;
  const auto [xs, ys] = run.data.scan.positions[centre];

  const msp::SolverConfig cfg = solver_config(run.config, opts);
  msp::ComplexVector p0 = msp::vectorise(
      msp::shift_probe(msp::make_probe(run.data.beam, run.data.geom), xs, ys));
  const msp::AfResult result =
      msp::reconstruct_probe(run.data.intensities[centre], a_hat, std::move(p0), cfg);

  const int n = run.data.geom.n;
  std::vector<double> amplitude(result.z.size()), phase(result.z.size());
  double peak = 0.0;
  for (const msp::cplx& z : result.z) peak = std::max(peak, std::abs(z));
  for (std::size_t i = 0; i < result.z.size(); ++i) {
    amplitude[i] = peak > 0.0 ? std::abs(result.z[i]) / peak : 0.0;
    phase[i] = std::arg(result.z[i]);
  }
  msp::write_gray_pgm(amplitude, n, out_dir / "probe_amplitude.pgm", "normalised");
  msp::write_real_csv(amplitude, n, out_dir / "probe_amplitude.csv");
  msp::write_gray_pgm(phase, n, out_dir / "probe_phase.pgm",
                      "rad, global phase arbitrary");
  msp::write_real_csv(phase, n, out_dir / "probe_phase.csv");

  std::cout << "probe reconstructed at scan position (" << xs << ',' << ys
            << ") objective=" << result.objective << " steps=" << result.steps
            << '\n';
  return kExitOk;
}

int run_metrics(const CommonOptions& opts) {
  const LoadedRun run = load_run(opts);
  const fs::path out_dir(opts.out_dir);
  const msp::StateFile file = msp::read_state(out_dir / "state.ms4r");
  if (file.n != static_cast<std::uint32_t>(run.data.geom.n))
    throw msp::DataError("state.ms4r grid size does not match the dataset");

  msp::ReconstructionState state;
  for (const msp::ComplexVector& d : file.slices) state.slices.push_back({d});
  state.fidelity_scale = file.fidelity_scale;

  std::vector<msp::PropagatorKernel> kernels;
  for (std::size_t m = 0; m + 1 < state.slices.size(); ++m)
    kernels.push_back(msp::make_propagator(run.data.geom, run.data.beam.wavelength,
                                           run.config.inv_fresnel_m));
  const double err =
      msp::state_measurement_error(state, run.data, run.probes, kernels);

  msp::ErrorReport report;
  report.iteration = 0;
  report.relative_measurement_error = err;
  if (run.truth && run.truth->slice_count == state.slices.size()) {
    const auto truth = truth_diagonals(*run.truth);
    report.relative_reconstruction_error_raw =
        msp::relative_reconstruction_error(truth, state.slices);
    const auto aligned = msp::align_global(state.slices, truth);
    report.relative_reconstruction_error_aligned =
        msp::relative_reconstruction_error(truth, aligned, &report.per_slice_errors);
    report.has_reconstruction_error = true;
  }
  write_history(out_dir / "metrics.csv", {report},
                static_cast<int>(state.slices.size()));
  std::cout << msp::error_report_csv_header(static_cast<int>(state.slices.size()))
            << '\n'
            << msp::error_report_csv_row(report) << '\n';
  return kExitOk;
}

struct IngestOptions {
  std::string in_path;
  std::string out_file = "ingested.ms4d";
  msp::RawLayout layout;
  std::string dtype = "u16";
  std::string endian = "little";
  double voltage_kv = 0.0;
  double pixel_nm = 0.0;
  double fresnel_nm = 0.0;
};

int run_ingest(const CommonOptions& opts, IngestOptions& ingest) {
  if (ingest.dtype == "u8") ingest.layout.bytes_per_sample = 1;
  else if (ingest.dtype == "u16") ingest.layout.bytes_per_sample = 2;
  else if (ingest.dtype == "u32") ingest.layout.bytes_per_sample = 4;
  else throw msp::DataError("ingest: unknown dtype '" + ingest.dtype + "'");
  ingest.layout.big_endian = ingest.endian == "big";

  const msp::MS4DContainer container = msp::ingest_raw(
      ingest.in_path, ingest.layout, ingest.voltage_kv * 1e3,
      ingest.pixel_nm * 1e-9, ingest.fresnel_nm * 1e-9);
  fs::create_directories(opts.out_dir);
  const fs::path out_path = resolve(opts.out_dir, ingest.out_file);
  msp::write_ms4d(out_path, container);
  std::cout << "ingested " << container.scan_y << 'x' << container.scan_x
            << " frames of " << container.n << 'x' << container.n << " -> "
            << out_path.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multislice electron ptychography toolkit"};
  app.require_subcommand(1);

  CommonOptions opts;
  IngestOptions ingest;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* config = cmd->add_option("--config", opts.config_path,
                                   "run configuration file");
    if (needs_config) config->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "override the configured seed");
    cmd->add_option("--threads", opts.threads, "worker threads for simulation");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "synthesise a 4-D dataset");
  add_common(simulate, true);

  CLI::App* layerwise =
      app.add_subcommand("reconstruct-layerwise", "alternating per-slice estimation");
  add_common(layerwise, true);
  layerwise->add_flag("--debug-truth-a", opts.debug_truth_a,
                      "score the ground-truth transfer matrix instead of solving");

  CLI::App* sparse =
      app.add_subcommand("reconstruct-sparse", "two-stage matrix decomposition");
  add_common(sparse, true);
  sparse->add_flag("--debug-truth-a", opts.debug_truth_a,
                   "score the ground-truth transfer matrix instead of solving");

  CLI::App* probe =
      app.add_subcommand("reconstruct-probe", "probe recovery from the centre pattern");
  add_common(probe, true);

  CLI::App* metrics = app.add_subcommand("metrics", "score a saved reconstruction");
  add_common(metrics, true);

  CLI::App* ing = app.add_subcommand("ingest", "convert raw detector frames");
  add_common(ing, false);
  ing->add_option("--in", ingest.in_path, "raw input file")->required();
  ing->add_option("--out-file", ingest.out_file, "container file to write");
  ing->add_option("--scan-y", ingest.layout.scan_y, "scan rows")->required();
  ing->add_option("--scan-x", ingest.layout.scan_x, "scan columns")->required();
  ing->add_option("--det-n", ingest.layout.det_n, "detector side in pixels")->required();
  ing->add_option("--dtype", ingest.dtype, "sample type: u8, u16 or u32");
  ing->add_option("--endian", ingest.endian, "sample byte order: little or big");
  ing->add_option("--crop", ingest.layout.crop, "centre-crop size (0 = full frame)");
  ing->add_option("--bin", ingest.layout.bin, "sum-binning factor");
  ing->add_option("--voltage-kv", ingest.voltage_kv, "acceleration voltage (kV)");
  ing->add_option("--pixel-nm", ingest.pixel_nm, "real-space sampling (nm)");
  ing->add_option("--fresnel-nm", ingest.fresnel_nm, "slice distance (nm)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(opts);
    if (layerwise->parsed()) return run_reconstruct(opts, /*sparse=*/false);
    if (sparse->parsed()) return run_reconstruct(opts, /*sparse=*/true);
    if (probe->parsed()) return run_reconstruct_probe(opts);
    if (metrics->parsed()) return run_metrics(opts);
    if (ing->parsed()) return run_ingest(opts, ingest);
  } catch (const msp::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const msp::SolverFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const msp::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}
