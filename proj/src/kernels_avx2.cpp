#include <immintrin.h>

#include <cmath>

#include "ladder/kernels.hpp"

namespace ladder::kernels::avx2 {

namespace {

constexpr std::size_t kAnchor = 256;

inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

// [a0 a0 a1 a1] from two consecutive weights
inline __m256d wdup(const double* w) {
  __m128d t = _mm_loadu_pd(w);
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(t), 0x50);
}

// complex product lane-pairwise
inline __m256d cmul(__m256d u, __m256d v) {
  __m256d ur = _mm256_movedup_pd(u);
  __m256d ui = _mm256_permute_pd(u, 0xF);
  __m256d vs = _mm256_permute_pd(v, 0x5);
  return _mm256_fmaddsub_pd(ur, v, _mm256_mul_pd(ui, vs));
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v), hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline cplx hsum_c(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v), hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return {_mm_cvtsd_f64(lo), _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo))};
}

}  // namespace

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    __m256d xv = load2(x + k);
    __m256d xs = _mm256_permute_pd(xv, 0x5);
    __m256d p = _mm256_fmaddsub_pd(ar, xv, _mm256_mul_pd(ai, xs));
    store2(y + k, _mm256_add_pd(load2(y + k), p));
  }
  for (; k < n; ++k) y[k] += a * x[k];
}

cplx wdot(std::size_t n, const double* w, const cplx* x, const cplx* y) {
  __m256d re = _mm256_setzero_pd(), im = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    __m256d wv = wdup(w + k);
    __m256d xv = _mm256_mul_pd(wv, load2(x + k));
    __m256d yv = load2(y + k);
    re = _mm256_fmadd_pd(xv, yv, re);
    im = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0x5), im);
  }
  alignas(32) double r[4], i4[4];
  _mm256_store_pd(r, re);
  _mm256_store_pd(i4, im);
  double sr = r[0] + r[1] + r[2] + r[3];
  double si = (i4[0] - i4[1]) + (i4[2] - i4[3]);
  for (; k < n; ++k) {
    cplx t = w[k] * std::conj(x[k]) * y[k];
    sr += t.real();
    si += t.imag();
  }
  return {sr, si};
}

double wnorm2(std::size_t n, const double* w, const cplx* x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    __m256d xv = load2(x + k);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(wdup(w + k), xv), xv, acc);
  }
  double s = hsum(acc);
  for (; k < n; ++k) s += w[k] * std::norm(x[k]);
  return s;
}

cplx phase_sum(std::size_t n, const cplx* y, double phi0, double dphi) {
  const cplx s2 = std::polar(1.0, 2 * dphi);
  const __m256d step2 = _mm256_setr_pd(s2.real(), s2.imag(), s2.real(), s2.imag());
  cplx acc = 0;
  for (std::size_t b = 0; b < n; b += kAnchor) {
    const std::size_t e = std::min(n, b + kAnchor);
    const cplx z0 = std::polar(1.0, phi0 + dphi * static_cast<double>(b));
    const cplx z1 = std::polar(1.0, phi0 + dphi * static_cast<double>(b + 1));
    __m256d z = _mm256_setr_pd(z0.real(), z0.imag(), z1.real(), z1.imag());
    __m256d sum = _mm256_setzero_pd();
    std::size_t k = b;
    for (; k + 2 <= e; k += 2) {
      sum = _mm256_add_pd(sum, cmul(load2(y + k), z));
      z = cmul(z, step2);
    }
    cplx part = hsum_c(sum);
    if (k < e) {
      alignas(32) double zz[4];
      _mm256_store_pd(zz, z);
      part += y[k] * cplx(zz[0], zz[1]);
    }
    acc += part;
  }
  return acc;
}

}  // namespace ladder::kernels::avx2
