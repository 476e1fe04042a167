#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>

#include "ladder/dynamics.hpp"
#include "ladder/kernels.hpp"
#include "ladder/parallel.hpp"

namespace ladder {

namespace {

struct Factors {
  std::vector<std::vector<cplx>> a, b;  // f(i,j) ~ sum_r a[r][i] * b[r][j]
  double discarded = 0;
};

Factors low_rank(const AmplitudeGrid& f, double tol, std::size_t max_rank) {
  const std::size_t n1 = f.n1(), n2 = f.n2();
  Eigen::MatrixXcd M(n1, n2);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j)
      M(i, j) = std::sqrt(f.axis1.weight(i)) * f.at(i, j) * std::sqrt(f.axis2.weight(j));
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Factors out;
  const double s0 = sv.size() ? sv(0) : 0.0;
  for (Eigen::Index r = 0; r < sv.size(); ++r) {
    if (s0 == 0 || sv(r) <= tol * s0 || static_cast<std::size_t>(r) >= max_rank) {
      out.discarded += sv(r) * sv(r);
      continue;
    }
    std::vector<cplx> a(n1), b(n2);
    for (std::size_t i = 0; i < n1; ++i) a[i] = svd.matrixU()(i, r) * sv(r) / std::sqrt(f.axis1.weight(i));
    for (std::size_t j = 0; j < n2; ++j) b[j] = std::conj(svd.matrixV()(j, r)) / std::sqrt(f.axis2.weight(j));
    out.a.push_back(std::move(a));
    out.b.push_back(std::move(b));
  }
  return out;
}

struct FftPlan {
  std::size_t n;
  fftw_complex* buf;
  fftw_plan plan;
  explicit FftPlan(std::size_t n_) : n(n_) {
    buf = fftw_alloc_complex(n);
    if (!buf) throw NumericalError("time-of-arrival solver: FFT buffer allocation failed");
    plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~FftPlan() {
    fftw_destroy_plan(plan);
    fftw_free(buf);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  cplx* data() { return reinterpret_cast<cplx*>(buf); }
};

// (1/sqrt(2 pi)) * integral of a(d) e^{-i d t} dd at t_n = t0 + n dt, where a
// is the axis interpolant of vals and d = x + shift.
std::vector<cplx> to_time(const Axis& ax, const std::vector<cplx>& vals, double shift, double t0,
                          double dt, std::size_t nt, FftPlan& fft) {
  const std::size_t nf = fft.n;
  const double D = 2 * kPi / (static_cast<double>(nf) * dt);
  const double lo = ax.lo();
  cplx* buf = fft.data();
  for (std::size_t m = 0; m < nf; ++m) {
    const double x = lo + m * D;
    if (x > ax.hi()) {
      buf[m] = 0;
      continue;
    }
    buf[m] = ax.interpolate(vals, x) * std::polar(1.0, -(m * D) * t0);
  }
  fftw_execute(fft.plan);
  const double dlo = lo + shift;
  std::vector<cplx> out(nt);
  const double scale = D / std::sqrt(2 * kPi);
  for (std::size_t n = 0; n < nt; ++n) out[n] = scale * std::polar(1.0, -dlo * (t0 + n * dt)) * buf[n];
  return out;
}

// One step of y' = c F(t) - k y with F linear over the step.
struct Etd {
  double decay, wn, wn1;
  Etd(double k, double dt) {
    const double z = k * dt;
    decay = std::exp(-z);
    if (z < 1e-4) {
      wn = dt * (0.5 - z / 3 + z * z / 8);
      wn1 = dt * (0.5 - z / 6 + z * z / 24);
    } else {
      wn = dt * (1 - decay * (1 + z)) / (z * z);
      wn1 = dt * (z - 1 + decay) / (z * z);
    }
  }
  cplx step(cplx y, cplx fn, cplx fn1) const { return decay * y + wn * fn + wn1 * fn1; }
};

std::vector<cplx> integrate_linear(const std::vector<cplx>& forcing, double c, double k, double dt) {
  Etd st(k, dt);
  std::vector<cplx> y(forcing.size());
  y[0] = 0;
  for (std::size_t n = 0; n + 1 < forcing.size(); ++n)
    y[n + 1] = st.step(y[n], c * forcing[n], c * forcing[n + 1]);
  return y;
}

// (1/norm) * integral over the samples of y(t) e^{i d t} dt with y linear
// between samples (exact for that interpolant).
cplx filon(const cplx* y, std::size_t n, double t0, double dt, double d) {
  if (n < 2) return 0;
  const double th = d * dt;
  cplx i0, i1;
  if (std::abs(th) < 1e-3) {
    const cplx it(0, th);
    i0 = dt * (1.0 + it / 2.0 + it * it / 6.0 + it * it * it / 24.0);
    i1 = dt * (0.5 + it / 3.0 + it * it / 8.0 + it * it * it / 30.0);
  } else {
    const cplx e = std::polar(1.0, th), it(0, th);
    i0 = dt * (e - 1.0) / it;
    i1 = dt * (e / it - (e - 1.0) / (it * it));
  }
  const cplx wa = i0 - i1, wb = i1;
  const cplx all = kernels::phase_sum(n, y, d * t0, th);
  const double tl = t0 + (n - 1) * dt;
  const cplx p0 = all - std::polar(1.0, d * tl) * y[n - 1];
  const cplx p1 = all - std::polar(1.0, d * t0) * y[0];
  return wa * p0 + wb * std::polar(1.0, -th) * p1;
}

double trapz_step(double a, double b, double dt) { return 0.5 * dt * (a + b); }

}  // namespace

ArrivalResult evolve_arrival(const AmplitudeGrid& f_in, const EmitterParams& e, const ArrivalOptions& opt) {
  e.validate(true);
  const std::size_t n1 = f_in.n1(), n2 = f_in.n2();
  const double s1 = f_in.carrier1 - e.omega_c, s2 = f_in.carrier2 - e.omega_t;
  const double gc = e.gamma_c, gt = e.gamma_t;

  TimeWindow win{opt.t_start, opt.t_end};
  if (opt.t_start == 0 && opt.t_end == 0) win = default_time_window(f_in, e);
  if (!(win.t_end > win.t_start)) throw InvalidParameter("time window requires t_start < t_end");

  const double span = std::max(f_in.axis1.hi() - f_in.axis1.lo(), f_in.axis2.hi() - f_in.axis2.lo());
  const double band_dt = 2 * kPi / (1.05 * span);
  double rate = std::max(gt, gc);
  for (const auto* ax : {&f_in.axis1, &f_in.axis2})
    for (const auto& c : ax->clusters()) rate = std::max(rate, c.width);
  double dt = opt.dt > 0 ? opt.dt : std::min(0.02 / rate, band_dt);
  if (dt > band_dt) throw InvalidParameter("time step too coarse for the grid bandwidth");
  auto count = [&](double h) { return static_cast<std::size_t>(std::ceil((win.t_end - win.t_start) / h)) + 1; };
  std::size_t nt = count(dt);
  if (2 * nt > opt.max_fft) {
    dt = std::min(band_dt, (win.t_end - win.t_start) / (opt.max_fft / 2 - 2));
    nt = count(dt);
    if (2 * nt > opt.max_fft) throw NumericalError("time-of-arrival grid exceeds the FFT size limit");
  }
  std::size_t nf = 1;
  while (nf < 2 * nt) nf <<= 1;
  const double t0 = win.t_start;

  Factors fac = low_rank(f_in, opt.rank_tol, opt.max_rank);
  const std::size_t R = fac.a.size();

  ArrivalResult res;
  res.rank = R;
  res.rank_discarded = fac.discarded;
  res.dt = dt;
  res.steps = nt;
  res.t_start = win.t_start;
  res.t_end = t0 + (nt - 1) * dt;
  res.output = AmplitudeGrid(f_in.axis1, f_in.axis2, f_in.carrier1, f_in.carrier2);

  std::vector<std::vector<cplx>> A(R), B(R), U(R);
  {
    FftPlan fft(nf);
    for (std::size_t r = 0; r < R; ++r) {
      A[r] = to_time(f_in.axis1, fac.a[r], s1, t0, dt, nt, fft);
      B[r] = to_time(f_in.axis2, fac.b[r], s2, t0, dt, nt, fft);
    }
  }
  for (std::size_t r = 0; r < R; ++r) U[r] = integrate_linear(A[r], std::sqrt(gc), 0.5 * gc, dt);

  std::vector<cplx> drive(nt, 0.0);
  for (std::size_t n = 0; n < nt; ++n) {
    cplx v = 0;
    for (std::size_t r = 0; r < R; ++r) v += B[r][n] * U[r][n];
    drive[n] = v;
  }
  std::vector<cplx> s = integrate_linear(drive, std::sqrt(gt), 0.5 * gt, dt);
  drive.clear();
  drive.shrink_to_fit();

  // Population bookkeeping. sigma = sqrt(gt) s is the amplitude the target
  // emission leaves in G at its arrival time; K_r and H carry its overlap with
  // the unscattered part and its own weight, decaying at the control rate.
  std::vector<cplx> gram(R * R);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t q = 0; q < R; ++q) {
      // time-domain inner product of B_r and B_q (trapezoid)
      cplx acc = 0;
      for (std::size_t n = 0; n < nt; ++n) acc += std::conj(B[r][n]) * B[q][n];
      acc -= 0.5 * (std::conj(B[r][0]) * B[q][0] + std::conj(B[r][nt - 1]) * B[q][nt - 1]);
      gram[r * R + q] = acc * dt;
    }
  const Etd kst(0.5 * gc, dt), hst(gc, dt);
  std::vector<cplx> K(R, 0.0);
  double H = 0;
  const double sg = std::sqrt(gt), sgc = std::sqrt(gc);
  std::vector<double> fin2(nt), fout2(nt), pe1(nt), pe2(nt);
  auto quantities = [&](std::size_t n) {
    double in2 = 0, g2 = 0;
    cplx cross = 0;
    for (std::size_t r = 0; r < R; ++r) {
      cplx bu = 0;
      for (std::size_t q = 0; q < R; ++q) {
        in2 += std::real(std::conj(A[r][n]) * A[q][n] * gram[r * R + q]);
        g2 += std::real(std::conj(U[r][n]) * U[q][n] * gram[r * R + q]);
        bu += gram[r * R + q] * U[q][n];
      }
      g2 -= 2 * std::real(std::conj(U[r][n]) * K[r]);
      cross += std::conj(A[r][n]) * (bu - K[r]);
    }
    g2 += H;
    fin2[n] = in2;
    pe1[n] = g2;
    pe2[n] = std::norm(s[n]);
    fout2[n] = in2 - 2 * sgc * std::real(cross) + gc * g2;
  };
  quantities(0);
  for (std::size_t n = 0; n + 1 < nt; ++n) {
    const cplx sn = sg * s[n], sn1 = sg * s[n + 1];
    for (std::size_t r = 0; r < R; ++r)
      K[r] = kst.step(K[r], std::conj(B[r][n]) * sn, std::conj(B[r][n + 1]) * sn1);
    H = std::real(hst.step(H, std::norm(sn), std::norm(sn1)));
    quantities(n + 1);
  }
  std::vector<double> cum_in(nt, 0.0), cum_out(nt, 0.0);
  for (std::size_t n = 1; n < nt; ++n) {
    cum_in[n] = cum_in[n - 1] + trapz_step(fin2[n - 1], fin2[n], dt);
    cum_out[n] = cum_out[n - 1] + trapz_step(fout2[n - 1], fout2[n], dt);
  }
  const double total_in = cum_in[nt - 1];
  double n0 = 0;
  const std::size_t ns = std::max<std::size_t>(2, opt.samples);
  for (std::size_t k = 0; k < ns; ++k) {
    const std::size_t n = std::min(nt - 1, (k * (nt - 1)) / (ns - 1));
    const double pf = total_in - cum_in[n] + cum_out[n];
    res.times.push_back(t0 + n * dt);
    res.p_field.push_back(pf);
    res.p_e1.push_back(pe1[n]);
    res.p_e2.push_back(pe2[n]);
  }
  for (std::size_t n = 0; n < nt; ++n) {
    const double tot = total_in - cum_in[n] + cum_out[n] + pe1[n] + pe2[n];
    if (n == 0) n0 = tot;
    res.max_norm_drift = std::max(res.max_norm_drift, std::abs(tot - n0));
  }
  res.residual_g = std::sqrt(std::max(0.0, pe1[nt - 1]));
  res.residual_s = std::abs(s[nt - 1]);
  if (opt.check_residuals && (res.residual_g > opt.residual_tolerance || res.residual_s > opt.residual_tolerance))
    throw IncompleteScattering("time window too short: emitter not decayed at t_end (|g| = " +
                                   std::to_string(res.residual_g) + ", |s| = " + std::to_string(res.residual_s) + ")",
                               res.residual_g, res.residual_s);
  A.clear();
  B.clear();

  // Back to the grid. Control-only emission: Fourier transform of U_r.
  std::vector<std::vector<cplx>> Ut(R, std::vector<cplx>(n1));
  const double inv = 1.0 / std::sqrt(2 * kPi);
  parallel_for(n1, [&](std::size_t i) {
    const double d1 = f_in.axis1.node(i) + s1;
    for (std::size_t r = 0; r < R; ++r) Ut[r][i] = inv * filon(U[r].data(), nt, t0, dt, d1);
  }, opt.threads);

  // Target-scattered part: depends on E = d1 + d2 only; tabulated on a sum axis.
  std::size_t na = 0, nb = nt;
  double smax = 0;
  for (const auto& v : s) smax = std::max(smax, std::abs(v));
  if (smax > 0) {
    while (na < nt && std::abs(s[na]) <= 1e-14 * smax) ++na;
    while (nb > na && std::abs(s[nb - 1]) <= 1e-14 * smax) --nb;
    na = na > 0 ? na - 1 : 0;
    nb = std::min(nt, nb + 1);
  }
  std::vector<ClusterComponent> sc;
  for (const auto& p : f_in.axis1.clusters())
    for (const auto& q : f_in.axis2.clusters()) sc.push_back({p.center + q.center, std::max(p.width, q.width)});
  const std::size_t nsum = 4 * std::max(n1, n2);
  const Axis sax(f_in.axis1.lo() + f_in.axis2.lo(), f_in.axis1.hi() + f_in.axis2.hi(), nsum, sc,
                 sc.empty() ? 1.0 : 0.05);
  std::vector<cplx> Stab(nsum, 0.0);
  if (smax > 0 && nb > na + 1) {
    const double ta = t0 + na * dt;
    parallel_for(nsum, [&](std::size_t k) {
      Stab[k] = filon(s.data() + na, nb - na, ta, dt, sax.node(k) + s1 + s2);
    }, opt.threads);
  }
  const double pref = std::sqrt(gc * gt) / (2 * kPi);
  parallel_for(n1, [&](std::size_t i) {
    const double x1 = f_in.axis1.node(i), d1 = x1 + s1;
    const cplx den = cplx(0.5 * gc, -d1);
    for (std::size_t j = 0; j < n2; ++j) {
      cplx v = f_in.at(i, j);
      for (std::size_t r = 0; r < R; ++r) v -= sgc * Ut[r][i] * fac.b[r][j];
      if (pref != 0) v += pref * sax.interpolate(Stab, x1 + f_in.axis2.node(j)) / den;
      res.output.at(i, j) = v;
    }
  }, opt.threads);
  return res;
}

}  // namespace ladder
