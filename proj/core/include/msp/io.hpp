#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "msp/forward.hpp"
#include "msp/solvers.hpp"
#include "msp/types.hpp"

namespace msp {

class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

class SizeMismatch : public DataError {
public:
  explicit SizeMismatch(const std::string& what) : DataError(what) {}
};

class MissingArtifact : public DataError {
public:
  explicit MissingArtifact(const std::string& what) : DataError(what) {}
};

/// Binary 4-D dataset container. All multi-byte values little-endian:
///   magic "MS4D" | version u32 | n u32 | scan_y u32 | scan_x u32
///   | voltage_volts f64 | pixel_size_m f64 | fresnel_distance_m f64
///   | payload: scan_y*scan_x*n*n intensities f64, ordered [sy][sx][y][x].
/// The version word keeps provenance in its high half (0 = simulated,
/// 1 = ingested raw frames); the low half is the format revision.
struct MS4DContainer {
  std::uint32_t version = 1;
  std::uint32_t n = 0;
  std::uint32_t scan_y = 0;
  std::uint32_t scan_x = 0;
  double voltage_volts = 0.0;
  double pixel_size_m = 0.0;
  double fresnel_distance_m = 0.0;
  std::vector<double> payload;

  static std::uint32_t make_version(std::uint16_t revision, std::uint16_t provenance) {
    return (static_cast<std::uint32_t>(provenance) << 16) | revision;
  }
};

void write_ms4d(const std::filesystem::path& path, const MS4DContainer& c);
MS4DContainer read_ms4d(const std::filesystem::path& path);

/// Ground-truth sidecar written next to simulated datasets: the true slice
/// diagonals and the centred probe, with the slice geometry needed to
/// reassemble the true transfer matrix. Same binary conventions as MS4D.
struct TruthSidecar {
  std::uint32_t n = 0;
  std::uint32_t slice_count = 0;
  double fresnel_distance_m = 0.0;
  ComplexVector probe;                   // n^2, centred
  std::vector<ComplexVector> slices;     // slice_count diagonals of n^2
};

void write_truth(const std::filesystem::path& path, const TruthSidecar& t);
TruthSidecar read_truth(const std::filesystem::path& path);

/// Dense transfer-matrix artifact produced by the sparse reconstruction.
void write_scattering(const std::filesystem::path& path, const ScatteringMatrix& a);
ScatteringMatrix read_scattering(const std::filesystem::path& path);

/// Reconstruction result: slice diagonals plus the fidelity scale.
struct StateFile {
  std::uint32_t n = 0;
  double fidelity_scale = 1.0;
  std::vector<ComplexVector> slices;
};

void write_state(const std::filesystem::path& path, const StateFile& s);
StateFile read_state(const std::filesystem::path& path);

/// Convert a container into the in-memory dataset, rebuilding the scan plan
/// from the given raster step. Rejects negative intensities.
Dataset4D dataset_from_container(const MS4DContainer& c, double semiconv_rad,
                                 int scan_step);

MS4DContainer container_from_dataset(const Dataset4D& data, int scan_y,
                                     int scan_x, std::uint16_t provenance = 0);

struct RawLayout {
  int scan_y = 0;
  int scan_x = 0;
  int det_n = 0;
  int bytes_per_sample = 2;  // 1, 2 or 4 (unsigned integer samples)
  bool big_endian = false;
  int crop = 0;  // centre-crop target (0 = keep full frame)
  int bin = 1;   // k x k sum binning after the crop
};

/// Read raw unsigned-integer detector frames into a container. The file must
/// be exactly scan_y*scan_x*det_n*det_n samples.
MS4DContainer ingest_raw(const std::filesystem::path& path, const RawLayout& layout,
                         double voltage_volts = 0.0, double pixel_size_m = 0.0,
                         double fresnel_distance_m = 0.0);

/// 8-bit grayscale PGM (P5), linearly mapped from [min, max] of the values;
/// the range and an optional note go into a comment line.
void write_gray_pgm(std::span<const double> values, int n,
                    const std::filesystem::path& path,
                    const std::string& note = "");

/// Full-precision CSV, n rows by n columns.
void write_real_csv(std::span<const double> values, int n,
                    const std::filesystem::path& path);

/// Phase map arg(diag) reshaped n x n as PGM plus raw-radian CSV.
void render_phase_map(const DiagonalOperator& diag, int n,
                      const std::filesystem::path& pgm_path,
                      const std::filesystem::path& csv_path);

/// Reads back a CSV written by write_real_csv / render_phase_map.
std::vector<double> read_phase_csv(const std::filesystem::path& path, int n);

}  // namespace msp
