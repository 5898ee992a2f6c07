#include <cstdint>
#include <fstream>

#include "msp/io.hpp"

namespace msp {

namespace {

std::uint32_t sample_at(const std::vector<unsigned char>& bytes, std::size_t index,
                        int width, bool big_endian) {
  const unsigned char* p = bytes.data() + index * width;
  std::uint32_t v = 0;
  if (big_endian) {
    for (int b = 0; b < width; ++b) v = (v << 8) | p[b];
  } else {
    for (int b = width - 1; b >= 0; --b) v = (v << 8) | p[b];
  }
  return v;
}

}  // namespace

MS4DContainer ingest_raw(const std::filesystem::path& path, const RawLayout& layout,
                         double voltage_volts, double pixel_size_m,
                         double fresnel_distance_m) {
  if (layout.scan_y < 1 || layout.scan_x < 1 || layout.det_n < 1)
    throw DataError("ingest_raw: layout dimensions must be positive");
  if (layout.bytes_per_sample != 1 && layout.bytes_per_sample != 2 &&
      layout.bytes_per_sample != 4)
    throw DataError("ingest_raw: sample width must be 1, 2 or 4 bytes");
  const int crop = layout.crop > 0 ? layout.crop : layout.det_n;
  if (crop > layout.det_n)
    throw DataError("ingest_raw: crop size exceeds detector size");
  if (layout.bin < 1 || crop % layout.bin != 0)
    throw DataError("ingest_raw: crop size must be divisible by the bin factor");

  const std::size_t frames =
      static_cast<std::size_t>(layout.scan_y) * layout.scan_x;
  const std::size_t frame_samples =
      static_cast<std::size_t>(layout.det_n) * layout.det_n;
  const std::size_t expected_bytes =
      frames * frame_samples * layout.bytes_per_sample;

  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw MissingArtifact("ingest_raw: cannot open " + path.string());
  const std::size_t actual_bytes = static_cast<std::size_t>(in.tellg());
  if (actual_bytes != expected_bytes)
    throw SizeMismatch("ingest_raw: expected " + std::to_string(expected_bytes) +
                       " bytes for the given layout, file has " +
                       std::to_string(actual_bytes));
  in.seekg(0);

  const int out_n = crop / layout.bin;
  const int offset = (layout.det_n - crop) / 2;

  MS4DContainer c;
  c.version = MS4DContainer::make_version(1, /*provenance=*/1);
  c.n = static_cast<std::uint32_t>(out_n);
  c.scan_y = static_cast<std::uint32_t>(layout.scan_y);
  c.scan_x = static_cast<std::uint32_t>(layout.scan_x);
  c.voltage_volts = voltage_volts;
  c.pixel_size_m = pixel_size_m;
  c.fresnel_distance_m = fresnel_distance_m;
  c.payload.assign(frames * out_n * out_n, 0.0);

  std::vector<unsigned char> frame(frame_samples * layout.bytes_per_sample);
  for (std::size_t f = 0; f < frames; ++f) {
    in.read(reinterpret_cast<char*>(frame.data()),
            static_cast<std::streamsize>(frame.size()));
    if (in.gcount() != static_cast<std::streamsize>(frame.size()))
      throw SizeMismatch("ingest_raw: truncated read");
    double* out = c.payload.data() + f * out_n * out_n;
    for (int y = 0; y < crop; ++y) {
      for (int x = 0; x < crop; ++x) {
        const std::size_t src =
            static_cast<std::size_t>(y + offset) * layout.det_n + (x + offset);
        const double v =
            sample_at(frame, src, layout.bytes_per_sample, layout.big_endian);
        out[static_cast<std::size_t>(y / layout.bin) * out_n + x / layout.bin] += v;
      }
    }
  }
  return c;
}

}  // namespace msp
