#include <cmath>
#include <fstream>
#include <sstream>

#include "msp/io.hpp"

namespace msp {

void write_gray_pgm(std::span<const double> values, int n,
                    const std::filesystem::path& path, const std::string& note) {
  const std::size_t dim = static_cast<std::size_t>(n) * n;
  if (values.size() != dim)
    throw DimensionMismatch("write_gray_pgm: value count does not equal n^2");

  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  std::ofstream pgm(path, std::ios::binary | std::ios::trunc);
  if (!pgm) throw DataError("write_gray_pgm: cannot write " + path.string());
  pgm << "P5\n";
  std::ostringstream comment;
  comment.precision(17);
  comment << "# range min=" << lo << " max=" << hi;
  if (!note.empty()) comment << ' ' << note;
  pgm << comment.str() << '\n' << n << ' ' << n << "\n255\n";
  const double span = hi - lo;
  for (double v : values) {
    const double t = span > 0.0 ? (v - lo) / span : 0.0;
    pgm.put(static_cast<char>(static_cast<unsigned char>(std::lround(t * 255.0))));
  }
  if (!pgm) throw DataError("write_gray_pgm: write failed for " + path.string());
}

void write_real_csv(std::span<const double> values, int n,
                    const std::filesystem::path& path) {
  const std::size_t dim = static_cast<std::size_t>(n) * n;
  if (values.size() != dim)
    throw DimensionMismatch("write_real_csv: value count does not equal n^2");
  std::ofstream csv(path, std::ios::trunc);
  if (!csv) throw DataError("write_real_csv: cannot write " + path.string());
  csv.precision(17);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (x) csv << ',';
      csv << values[static_cast<std::size_t>(y) * n + x];
    }
    csv << '\n';
  }
  if (!csv) throw DataError("write_real_csv: write failed for " + path.string());
}

void render_phase_map(const DiagonalOperator& diag, int n,
                      const std::filesystem::path& pgm_path,
                      const std::filesystem::path& csv_path) {
  const std::size_t dim = static_cast<std::size_t>(n) * n;
  if (diag.diag.size() != dim)
    throw DimensionMismatch("render_phase_map: diagonal length does not equal n^2");
  std::vector<double> phase(dim);
  for (std::size_t i = 0; i < dim; ++i) phase[i] = std::arg(diag.diag[i]);
  write_gray_pgm(phase, n, pgm_path, "rad");
  write_real_csv(phase, n, csv_path);
}

std::vector<double> read_phase_csv(const std::filesystem::path& path, int n) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("read_phase_csv: cannot open " + path.string());
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) * n);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
  }
  if (values.size() != static_cast<std::size_t>(n) * n)
    throw SizeMismatch("read_phase_csv: expected " + std::to_string(n * n) +
                       " values, found " + std::to_string(values.size()));
  return values;
}

}  // namespace msp
