#include "ladder/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace ladder::kernels {

namespace {

constexpr std::size_t kAnchor = 256;

Isa initial_isa() {
  const char* env = std::getenv("LADDER_GATE_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  return detected_isa();
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

Isa detected_isa() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::Avx2;
#endif
  return Isa::Scalar;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::Avx2 && detected_isa() != Isa::Avx2) isa = Isa::Scalar;
  current().store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  if (active_isa() == Isa::Avx2) return avx2::caxpy(n, a, x, y);
  scalar::caxpy(n, a, x, y);
}

cplx wdot(std::size_t n, const double* w, const cplx* x, const cplx* y) {
  if (active_isa() == Isa::Avx2) return avx2::wdot(n, w, x, y);
  return scalar::wdot(n, w, x, y);
}

double wnorm2(std::size_t n, const double* w, const cplx* x) {
  if (active_isa() == Isa::Avx2) return avx2::wnorm2(n, w, x);
  return scalar::wnorm2(n, w, x);
}

cplx phase_sum(std::size_t n, const cplx* y, double phi0, double dphi) {
  if (active_isa() == Isa::Avx2) return avx2::phase_sum(n, y, phi0, dphi);
  return scalar::phase_sum(n, y, phi0, dphi);
}

namespace scalar {

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const double ar = a.real(), ai = a.imag();
  for (std::size_t k = 0; k < n; ++k) {
    const double xr = x[k].real(), xi = x[k].imag();
    y[k] = cplx(y[k].real() + ar * xr - ai * xi, y[k].imag() + ar * xi + ai * xr);
  }
}

cplx wdot(std::size_t n, const double* w, const cplx* x, const cplx* y) {
  double sr = 0, si = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double xr = x[k].real(), xi = x[k].imag(), yr = y[k].real(), yi = y[k].imag();
    sr += w[k] * (xr * yr + xi * yi);
    si += w[k] * (xr * yi - xi * yr);
  }
  return {sr, si};
}

double wnorm2(std::size_t n, const double* w, const cplx* x) {
  double s = 0;
  for (std::size_t k = 0; k < n; ++k) s += w[k] * std::norm(x[k]);
  return s;
}

cplx phase_sum(std::size_t n, const cplx* y, double phi0, double dphi) {
  const cplx step = std::polar(1.0, dphi);
  cplx acc = 0;
  for (std::size_t b = 0; b < n; b += kAnchor) {
    cplx z = std::polar(1.0, phi0 + dphi * static_cast<double>(b));
    const std::size_t e = std::min(n, b + kAnchor);
    double sr = 0, si = 0;
    for (std::size_t k = b; k < e; ++k) {
      sr += y[k].real() * z.real() - y[k].imag() * z.imag();
      si += y[k].real() * z.imag() + y[k].imag() * z.real();
      z *= step;
    }
    acc += cplx(sr, si);
  }
  return acc;
}

}  // namespace scalar

}  // namespace ladder::kernels
