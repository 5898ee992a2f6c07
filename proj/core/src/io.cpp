#include "msp/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace msp {

namespace {

static_assert(std::endian::native == std::endian::little,
              "container I/O assumes a little-endian host");

void put_bytes(std::ofstream& out, const void* p, std::size_t count) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(count));
}

void get_bytes(std::ifstream& in, void* p, std::size_t count,
               const std::string& what) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(count));
  if (in.gcount() != static_cast<std::streamsize>(count))
    throw SizeMismatch(what + ": truncated file");
}

void put_u32(std::ofstream& out, std::uint32_t v) { put_bytes(out, &v, 4); }
void put_f64(std::ofstream& out, double v) { put_bytes(out, &v, 8); }

std::uint32_t get_u32(std::ifstream& in, const std::string& what) {
  std::uint32_t v;
  get_bytes(in, &v, 4, what);
  return v;
}

double get_f64(std::ifstream& in, const std::string& what) {
  double v;
  get_bytes(in, &v, 8, what);
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifact("cannot open for reading: " + path.string());
  return in;
}

void check_magic(std::ifstream& in, const char expected[4],
                 const std::string& path) {
  char magic[4];
  get_bytes(in, magic, 4, path);
  if (std::memcmp(magic, expected, 4) != 0)
    throw DataError(path + ": bad magic, expected " +
                    std::string(expected, 4));
}

void put_complex_vector(std::ofstream& out, const ComplexVector& v) {
  for (const cplx& z : v) {
    put_f64(out, z.real());
    put_f64(out, z.imag());
  }
}

ComplexVector get_complex_vector(std::ifstream& in, std::size_t count,
                                 const std::string& what) {
  ComplexVector v(count);
  for (cplx& z : v) {
    const double re = get_f64(in, what);
    const double im = get_f64(in, what);
    z = cplx(re, im);
  }
  return v;
}

void expect_eof(std::ifstream& in, const std::string& what) {
  char extra;
  in.read(&extra, 1);
  if (in.gcount() != 0) throw SizeMismatch(what + ": trailing bytes");
}

}  // namespace

void write_ms4d(const std::filesystem::path& path, const MS4DContainer& c) {
  const std::size_t expected = static_cast<std::size_t>(c.scan_y) * c.scan_x *
                               c.n * c.n;
  if (c.payload.size() != expected)
    throw SizeMismatch("write_ms4d: payload length " +
                       std::to_string(c.payload.size()) + " does not match header " +
                       std::to_string(expected));
  std::ofstream out = open_out(path);
  put_bytes(out, "MS4D", 4);
  put_u32(out, c.version);
  put_u32(out, c.n);
  put_u32(out, c.scan_y);
  put_u32(out, c.scan_x);
  put_f64(out, c.voltage_volts);
  put_f64(out, c.pixel_size_m);
  put_f64(out, c.fresnel_distance_m);
  put_bytes(out, c.payload.data(), c.payload.size() * sizeof(double));
  if (!out) throw DataError("write_ms4d: write failed for " + path.string());
}

MS4DContainer read_ms4d(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  const std::string what = "read_ms4d(" + path.string() + ")";
  check_magic(in, "MS4D", what);
  MS4DContainer c;
  c.version = get_u32(in, what);
  c.n = get_u32(in, what);
  c.scan_y = get_u32(in, what);
  c.scan_x = get_u32(in, what);
  c.voltage_volts = get_f64(in, what);
  c.pixel_size_m = get_f64(in, what);
  c.fresnel_distance_m = get_f64(in, what);
  const std::size_t expected = static_cast<std::size_t>(c.scan_y) * c.scan_x *
                               c.n * c.n;
  c.payload.resize(expected);
  get_bytes(in, c.payload.data(), expected * sizeof(double), what);
  expect_eof(in, what);
  for (double v : c.payload)
    if (v < 0.0) throw DataError(what + ": negative intensity value");
  return c;
}

void write_truth(const std::filesystem::path& path, const TruthSidecar& t) {
  std::ofstream out = open_out(path);
  put_bytes(out, "MS4G", 4);
  put_u32(out, 1);
  put_u32(out, t.n);
  put_u32(out, t.slice_count);
  put_f64(out, t.fresnel_distance_m);
  put_complex_vector(out, t.probe);
  for (const ComplexVector& s : t.slices) put_complex_vector(out, s);
  if (!out) throw DataError("write_truth: write failed for " + path.string());
}

TruthSidecar read_truth(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  const std::string what = "read_truth(" + path.string() + ")";
  check_magic(in, "MS4G", what);
  (void)get_u32(in, what);  // version
  TruthSidecar t;
  t.n = get_u32(in, what);
  t.slice_count = get_u32(in, what);
  t.fresnel_distance_m = get_f64(in, what);
  const std::size_t dim = static_cast<std::size_t>(t.n) * t.n;
  t.probe = get_complex_vector(in, dim, what);
  t.slices.reserve(t.slice_count);
  for (std::uint32_t m = 0; m < t.slice_count; ++m)
    t.slices.push_back(get_complex_vector(in, dim, what));
  expect_eof(in, what);
  return t;
}

void write_scattering(const std::filesystem::path& path, const ScatteringMatrix& a) {
  std::ofstream out = open_out(path);
  put_bytes(out, "MS4A", 4);
  put_u32(out, 1);
  const std::uint32_t n =
      static_cast<std::uint32_t>(std::lround(std::sqrt(static_cast<double>(a.a.rows))));
  put_u32(out, n);
  put_complex_vector(out, a.a.data);
  if (!out) throw DataError("write_scattering: write failed for " + path.string());
}

ScatteringMatrix read_scattering(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  const std::string what = "read_scattering(" + path.string() + ")";
  check_magic(in, "MS4A", what);
  (void)get_u32(in, what);
  const std::uint32_t n = get_u32(in, what);
  const std::size_t dim = static_cast<std::size_t>(n) * n;
  ScatteringMatrix a;
  a.a = DenseComplexMatrix(dim, dim);
  a.a.data = get_complex_vector(in, dim * dim, what);
  expect_eof(in, what);
  return a;
}

void write_state(const std::filesystem::path& path, const StateFile& s) {
  std::ofstream out = open_out(path);
  put_bytes(out, "MS4R", 4);
  put_u32(out, 1);
  put_u32(out, s.n);
  put_u32(out, static_cast<std::uint32_t>(s.slices.size()));
  put_f64(out, s.fidelity_scale);
  for (const ComplexVector& d : s.slices) put_complex_vector(out, d);
  if (!out) throw DataError("write_state: write failed for " + path.string());
}

StateFile read_state(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  const std::string what = "read_state(" + path.string() + ")";
  check_magic(in, "MS4R", what);
  (void)get_u32(in, what);
  StateFile s;
  s.n = get_u32(in, what);
  const std::uint32_t m = get_u32(in, what);
  s.fidelity_scale = get_f64(in, what);
  const std::size_t dim = static_cast<std::size_t>(s.n) * s.n;
  s.slices.reserve(m);
  for (std::uint32_t i = 0; i < m; ++i)
    s.slices.push_back(get_complex_vector(in, dim, what));
  expect_eof(in, what);
  return s;
}

Dataset4D dataset_from_container(const MS4DContainer& c, double semiconv_rad,
                                 int scan_step) {
  Dataset4D data;
  data.geom.n = static_cast<int>(c.n);
  data.geom.pixel_size = c.pixel_size_m;
  data.beam = make_beam(c.voltage_volts, semiconv_rad);
  data.scan = raster_scan(static_cast<int>(c.scan_y), static_cast<int>(c.scan_x),
                          scan_step, data.geom.n);
  const std::size_t dim = static_cast<std::size_t>(c.n) * c.n;
  data.intensities.resize(data.scan.count());
  for (std::size_t s = 0; s < data.scan.count(); ++s) {
    data.intensities[s].assign(c.payload.begin() + s * dim,
                               c.payload.begin() + (s + 1) * dim);
  }
  return data;
}

MS4DContainer container_from_dataset(const Dataset4D& data, int scan_y,
                                     int scan_x, std::uint16_t provenance) {
  if (static_cast<std::size_t>(scan_y) * scan_x != data.intensities.size())
    throw SizeMismatch("container_from_dataset: raster dims do not match patterns");
  MS4DContainer c;
  c.version = MS4DContainer::make_version(1, provenance);
  c.n = static_cast<std::uint32_t>(data.geom.n);
  c.scan_y = static_cast<std::uint32_t>(scan_y);
  c.scan_x = static_cast<std::uint32_t>(scan_x);
  c.voltage_volts = data.beam.voltage;
  c.pixel_size_m = data.geom.pixel_size;
  c.fresnel_distance_m = data.distances.empty() ? 0.0 : data.distances.front();
  const std::size_t dim = static_cast<std::size_t>(data.geom.n) * data.geom.n;
  c.payload.reserve(data.intensities.size() * dim);
  for (const RealGrid& pattern : data.intensities)
    c.payload.insert(c.payload.end(), pattern.begin(), pattern.end());
  return c;
}

}  // namespace msp
