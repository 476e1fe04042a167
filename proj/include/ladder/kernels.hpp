#pragma once

#include <complex>
#include <cstddef>

namespace ladder::kernels {

using cplx = std::complex<double>;

enum class Isa { Scalar, Avx2 };

// Best ISA the CPU supports (AVX2 requires FMA as well).
Isa detected_isa();
// ISA currently used by the dispatching entry points. Defaults to
// detected_isa(); LADDER_GATE_SIMD=scalar forces the reference path.
Isa active_isa();
void set_active_isa(Isa isa);
const char* isa_name(Isa isa);

// y[k] += a * x[k]
void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
// sum_k w[k] * conj(x[k]) * y[k]
cplx wdot(std::size_t n, const double* w, const cplx* x, const cplx* y);
// sum_k w[k] * |x[k]|^2
double wnorm2(std::size_t n, const double* w, const cplx* x);
// sum_k y[k] * z0 * step^k, phasor re-anchored periodically with std::polar.
// Arguments are given as phases: z0 = exp(i*phi0), step = exp(i*dphi).
cplx phase_sum(std::size_t n, const cplx* y, double phi0, double dphi);

namespace scalar {
void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
cplx wdot(std::size_t n, const double* w, const cplx* x, const cplx* y);
double wnorm2(std::size_t n, const double* w, const cplx* x);
cplx phase_sum(std::size_t n, const cplx* y, double phi0, double dphi);
}  // namespace scalar

namespace avx2 {
void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
cplx wdot(std::size_t n, const double* w, const cplx* x, const cplx* y);
double wnorm2(std::size_t n, const double* w, const cplx* x);
cplx phase_sum(std::size_t n, const cplx* y, double phi0, double dphi);
}  // namespace avx2

}  // namespace ladder::kernels
