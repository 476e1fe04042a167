#include "ladder/smatrix.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <mutex>

#include "ladder/parallel.hpp"

namespace ladder {

cplx control_reflection(double d, double gamma_c) {
  return -cplx(0.5 * gamma_c, d) / cplx(0.5 * gamma_c, -d);
}

cplx target_resonant_factor(double delta_t, double gamma_t) {
  const double x = delta_t / (0.5 * gamma_t);
  return -cplx(1.0, x) / cplx(1.0, -x);
}

cplx MirroredPacket::operator()(double k) const {
  return -std::sqrt(width / (2 * kPi)) / cplx(0.5 * width, -(k - center));
}

MirroredPacket mirrored_control_packet(const PhotonPacket& control) {
  control.validate();
  return {control.center, control.width};
}

namespace {

// C^1 map from the CDF coordinate of an axis to the offset, built from a
// tabulated quantile with exact slopes 1/p at the knots (cubic Hermite).
class QuantileMap {
 public:
  QuantileMap(const Axis& ax, std::size_t knots) : m_(knots) {
    u_.resize(m_ + 1);
    s_.resize(m_ + 1);
    for (std::size_t k = 0; k <= m_; ++k) {
      u_[k] = ax.quantile(static_cast<double>(k) / m_);
      s_[k] = 1.0 / ax.density(u_[k]);
    }
  }
  // offset and d(offset)/dtheta
  void eval(double th, double& x, double& dx) const {
    double t = std::clamp(th, 0.0, 1.0) * m_;
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(t), m_ - 1);
    double r = t - k, h = 1.0 / m_;
    double r2 = r * r, r3 = r2 * r;
    double h00 = 2 * r3 - 3 * r2 + 1, h10 = r3 - 2 * r2 + r, h01 = -2 * r3 + 3 * r2, h11 = r3 - r2;
    x = h00 * u_[k] + h10 * h * s_[k] + h01 * u_[k + 1] + h11 * h * s_[k + 1];
    double d00 = 6 * r2 - 6 * r, d10 = 3 * r2 - 4 * r + 1, d01 = -6 * r2 + 6 * r, d11 = 3 * r2 - 2 * r;
    dx = (d00 * u_[k] + d01 * u_[k + 1]) / h + d10 * s_[k] + d11 * s_[k + 1];
  }

 private:
  std::size_t m_;
  std::vector<double> u_, s_;
};

}  // namespace

AmplitudeGrid scatter_exact(const AmplitudeGrid& f_in, const EmitterParams& e,
                            const ScatterOptions& opt, ScatterDiagnostics* diag) {
  e.validate(true);
  const std::size_t n1 = f_in.n1(), n2 = f_in.n2();
  AmplitudeGrid out(f_in.axis1, f_in.axis2, f_in.carrier1, f_in.carrier2);
  const double s1 = f_in.carrier1 - e.omega_c;  // axis offset -> detuning from Omega_C
  const double s2 = f_in.carrier2 - e.omega_t;
  const double gc = e.gamma_c, gt = e.gamma_t;
  const double pref = gt * gc / (2 * kPi);
  const Axis& a1 = f_in.axis1;
  const Axis& a2 = f_in.axis2;

  if (pref == 0) {
    for (std::size_t i = 0; i < n1; ++i) {
      const cplx c = control_reflection(a1.node(i) + s1, gc);
      for (std::size_t j = 0; j < n2; ++j) out.at(i, j) = c * f_in.at(i, j);
    }
    if (diag) *diag = {};
    return out;
  }

  // The convolution only depends on S = x1 + x2. Tabulate it on an axis that
  // clusters at every sum of the two axes' cluster centers.
  std::vector<ClusterComponent> sc;
  for (const auto& p : a1.clusters())
    for (const auto& q : a2.clusters()) sc.push_back({p.center + q.center, std::max(p.width, q.width)});
  const std::size_t ns = opt.s_oversample * std::max(n1, n2);
  const Axis sax(a1.lo() + a2.lo(), a1.hi() + a2.hi(), ns, sc, sc.empty() ? 1.0 : 0.05);
  const QuantileMap qmap(a1, 8 * n1);

  std::vector<cplx> Gtab(ns);
  std::vector<double> tail_tab(ns), err_tab(ns);
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

  auto one = [&](std::size_t k) {
    const double S = sax.node(k);
    const double ulo = std::max(a1.lo(), S - a2.hi());
    const double uhi = std::min(a1.hi(), S - a2.lo());
    if (!(uhi > ulo)) {
      Gtab[k] = 0;
      tail_tab[k] = err_tab[k] = 0;
      return;
    }
    auto integrand_u = [&](double u, double th) -> cplx {
      std::size_t i0, j0;
      double ca[4], cb[4];
      a1.stencil_cdf(th, i0, ca);
      if (!a2.stencil(S - u, j0, cb)) return 0.0;
      cplx acc = 0;
      for (int p = 0; p < 4; ++p) {
        const cplx* r = &f_in.values[(i0 + p) * n2 + j0];
        acc += ca[p] * (cb[0] * r[0] + cb[1] * r[1] + cb[2] * r[2] + cb[3] * r[3]);
      }
      return acc / cplx(0.5 * gc, -(u + s1));
    };
    auto integrand = [&](double th) -> cplx {
      double u, du;
      qmap.eval(th, u, du);
      return integrand_u(u, th) * du;
    };
    // Panels between axis-1 nodes, where the axis-1 interpolant is one cubic.
    const double tha = a1.cdf(ulo), thb = a1.cdf(uhi);
    cplx G = 0;
    double err = 0;
    double lo = tha;
    std::size_t kk = static_cast<std::size_t>(std::max(0.0, std::floor(tha * n1 - 0.5)));
    while (lo < thb) {
      double hi = thb;
      for (; kk < n1; ++kk) {
        double b = (kk + 0.5) / n1;
        if (b > lo) {
          hi = std::min(b, thb);
          break;
        }
      }
      double pe = 0;
      G += GK::integrate(integrand, lo, hi, opt.max_depth, opt.rel_tol, &pe);
      err += pe;
      lo = hi;
    }
    // Out-of-window tail: the integrand decays at least like 1/u^2 beyond a
    // truncated end, so the remainder is about |h(end)| times the distance.
    double tail = 0;
    for (double ue : {ulo, uhi}) tail += std::abs(integrand_u(ue, a1.cdf(ue))) * std::max(std::abs(ue + s1), gc);
    Gtab[k] = G;
    tail_tab[k] = tail;
    err_tab[k] = err;
  };
  parallel_for(ns, one, opt.threads);

  std::vector<cplx> tail_c(tail_tab.begin(), tail_tab.end()), err_c(err_tab.begin(), err_tab.end());
  std::vector<double> row_neglect(n1, 0.0), row_err(n1, 0.0);
  auto row = [&](std::size_t i) {
    const double x1 = a1.node(i);
    const double d1 = x1 + s1;
    const cplx c = control_reflection(d1, gc);
    double neg = 0, qerr = 0;
    for (std::size_t j = 0; j < n2; ++j) {
      const double x2 = a2.node(j);
      const double d2 = x2 + s2;
      const double S = x1 + x2;
      const cplx den = cplx(0.5 * gc, -d1) * cplx(0.5 * gt, -(d1 + d2));
      out.at(i, j) = c * f_in.at(i, j) + pref * sax.interpolate(Gtab, S) / den;
      const double scale = std::abs(pref / den);
      const double w = a1.weight(i) * a2.weight(j);
      neg += w * std::pow(scale * std::abs(sax.interpolate(tail_c, S)), 2);
      qerr += w * std::pow(scale * std::abs(sax.interpolate(err_c, S)), 2);
    }
    row_neglect[i] = neg;
    row_err[i] = qerr;
  };
  parallel_for(n1, row, opt.threads);

  double neglected = 0, qe = 0;
  for (std::size_t i = 0; i < n1; ++i) {
    neglected += row_neglect[i];
    qe += row_err[i];
  }
  if (diag) {
    diag->neglected_mass = neglected;
    diag->quadrature_error = std::sqrt(qe);
  }
  if (neglected > opt.truncation_budget)
    throw TruncationError("scatter_exact: estimated out-of-window mass " + std::to_string(neglected) +
                              " exceeds budget " + std::to_string(opt.truncation_budget),
                          1.0 - neglected);
  return out;
}

AmplitudeGrid scatter_markov_approx(const AmplitudeGrid& f_in, const EmitterParams& e,
                                    double control_center, double separability_tol) {
  e.validate();
  if (f_in.separability_defect() > separability_tol)
    throw UnsupportedInput("scatter_markov_approx requires a product-state input grid");
  const double s1 = f_in.carrier1 - e.omega_c;
  const double dc = control_center - e.omega_c;
  const double gc = e.gamma_c, gt = e.gamma_t;
  const cplx amp = 2.0 / cplx(1.0, -dc / gc);
  AmplitudeGrid out(f_in.axis1, f_in.axis2, f_in.carrier1, f_in.carrier2);
  const std::size_t n1 = f_in.n1(), n2 = f_in.n2();
  // Product input: f(x1, y) = f(x1, .) evaluated along axis 2 by interpolation.
  for (std::size_t i = 0; i < n1; ++i) {
    const double d1 = f_in.axis1.node(i) + s1;
    const cplx c = control_reflection(d1, gc);
    const cplx* row = &f_in.values[i * n2];
    for (std::size_t j = 0; j < n2; ++j) {
      const double x2 = f_in.axis2.node(j);
      const double d2 = x2 + f_in.carrier2 - e.omega_t;
      const cplx shifted = f_in.axis2.interpolate(row, 1, x2 + d1 - 0.5 * dc);
      const cplx corr = amp * shifted / cplx(1.0, -(d1 + d2) / (0.5 * gt));
      out.at(i, j) = c * (row[j] - corr);
    }
  }
  return out;
}

AmplitudeGrid scatter_resonant(const AmplitudeGrid& f_in, const EmitterParams& e, double delta_t) {
  e.validate();
  const double s1 = f_in.carrier1 - e.omega_c;
  const cplx t = target_resonant_factor(delta_t, e.gamma_t);
  AmplitudeGrid out(f_in.axis1, f_in.axis2, f_in.carrier1, f_in.carrier2);
  for (std::size_t i = 0; i < f_in.n1(); ++i) {
    const cplx c = control_reflection(f_in.axis1.node(i) + s1, e.gamma_c) * t;
    for (std::size_t j = 0; j < f_in.n2(); ++j) out.at(i, j) = c * f_in.at(i, j);
  }
  return out;
}

AmplitudeGrid scatter(ScatterTier tier, const AmplitudeGrid& f_in, const EmitterParams& e,
                      double control_center, double delta_t, const ScatterOptions& opt,
                      ScatterDiagnostics* diag) {
  switch (tier) {
    case ScatterTier::ExactEq3: return scatter_exact(f_in, e, opt, diag);
    case ScatterTier::MarkovApproxEq5: return scatter_markov_approx(f_in, e, control_center);
    case ScatterTier::ResonantEq6: return scatter_resonant(f_in, e, delta_t);
  }
  throw InvalidParameter("unknown scatter tier");
}

}  // namespace ladder
