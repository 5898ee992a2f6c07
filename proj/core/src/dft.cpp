#include "msp/dft.hpp"

#include <fftw3.h>

#include <cstring>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace msp {

namespace {

// FFTW's planner is not thread-safe; executing a plan is. Plans run on
// per-thread scratch buffers so concurrent transforms never contend.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanEntry {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  std::size_t count = 0;

  PlanEntry(const PlanEntry&) = delete;
  PlanEntry& operator=(const PlanEntry&) = delete;

  explicit PlanEntry(int n) : count(static_cast<std::size_t>(n) * n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    in = fftw_alloc_complex(count);
    out = fftw_alloc_complex(count);
    forward = fftw_plan_dft_2d(n, n, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft_2d(n, n, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  ~PlanEntry() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(in);
    fftw_free(out);
  }
};

PlanEntry& plans_for(int n) {
  thread_local std::unordered_map<int, std::unique_ptr<PlanEntry>> cache;
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, std::make_unique<PlanEntry>(n)).first;
  return *it->second;
}

void run(std::span<const cplx> in, std::span<cplx> out, int n, bool forward) {
  const std::size_t count = static_cast<std::size_t>(n) * n;
  if (in.size() != count || out.size() != count)
    throw DimensionMismatch("dft2: buffer length does not equal n^2");
  PlanEntry& p = plans_for(n);
  // std::complex<double> is layout-compatible with fftw_complex
  std::memcpy(static_cast<void*>(p.in), static_cast<const void*>(in.data()),
              count * sizeof(cplx));
  fftw_execute(forward ? p.forward : p.backward);
  std::memcpy(static_cast<void*>(out.data()), static_cast<const void*>(p.out),
              count * sizeof(cplx));
  if (!forward) {
    const double scale = 1.0 / static_cast<double>(count);
    for (cplx& z : out) z *= scale;
  }
}

}  // namespace

void dft2_forward_span(std::span<const cplx> in, std::span<cplx> out, int n) {
  run(in, out, n, true);
}

void dft2_inverse_span(std::span<const cplx> in, std::span<cplx> out, int n) {
  run(in, out, n, false);
}

ComplexGrid dft2_forward(const ComplexGrid& g) {
  ComplexGrid out(g.n());
  dft2_forward_span(g.data(), out.data(), g.n());
  return out;
}

ComplexGrid dft2_inverse(const ComplexGrid& g) {
  ComplexGrid out(g.n());
  dft2_inverse_span(g.data(), out.data(), g.n());
  return out;
}

}  // namespace msp
