#include "ladder/dynamics.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "ladder/kernels.hpp"

namespace ladder {

namespace {

// Full width at half maximum of a sampled marginal density; the whole span
// if it never drops to half.
double marginal_fwhm(const Axis& ax, const std::vector<double>& rho) {
  const std::size_t n = rho.size();
  std::size_t pk = std::max_element(rho.begin(), rho.end()) - rho.begin();
  const double half = 0.5 * rho[pk];
  if (half <= 0) return ax.hi() - ax.lo();
  double left = ax.lo(), right = ax.hi();
  for (std::size_t i = pk; i > 0; --i)
    if (rho[i - 1] <= half) {
      const double t = (rho[i] - half) / (rho[i] - rho[i - 1]);
      left = ax.node(i) - t * (ax.node(i) - ax.node(i - 1));
      break;
    }
  for (std::size_t i = pk; i + 1 < n; ++i)
    if (rho[i + 1] <= half) {
      const double t = (rho[i] - half) / (rho[i] - rho[i + 1]);
      right = ax.node(i) + t * (ax.node(i + 1) - ax.node(i));
      break;
    }
  return right - left;
}

}  // namespace

TimeWindow default_time_window(const AmplitudeGrid& f_in, const EmitterParams& e, double level) {
  if (!(level > 0 && level < 1)) throw InvalidParameter("time window level must lie in (0, 1)");
  const std::size_t n1 = f_in.n1(), n2 = f_in.n2();
  std::vector<double> r1(n1, 0.0), r2(n2, 0.0);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) {
      const double p = std::norm(f_in.at(i, j));
      r1[i] += f_in.axis2.weight(j) * p;
      r2[j] += f_in.axis1.weight(i) * p;
    }
  // A Lorentzian of width w arrives with envelope exp(w t / 2); the emitter
  // amplitudes decay as exp(-gamma t / 2) afterwards.
  const double w = std::min(marginal_fwhm(f_in.axis1, r1), marginal_fwhm(f_in.axis2, r2));
  const double L = 2 * std::log(1.0 / level);
  TimeWindow tw{-L / w, L / w};
  double g = 0;
  for (double r : {e.gamma_c, e.gamma_t})
    if (r > 0) g = g > 0 ? std::min(g, r) : r;
  if (g > 0) tw.t_end = L / g;
  return tw;
}

SystemTrajectory evolve(const AmplitudeGrid& f_in, const EmitterParams& e, double t_start, double t_end,
                        const StepControl& control) {
  e.validate(true);
  if (!(t_end > t_start)) throw InvalidParameter("evolve requires t_start < t_end");
  if (control.samples < 2) throw InvalidParameter("evolve requires at least two samples");
  if (!control.adaptive && !(control.fixed_step > 0)) throw InvalidParameter("fixed-step evolve requires fixed_step > 0");

  const std::size_t n1 = f_in.n1(), n2 = f_in.n2(), nf = n1 * n2;
  const double s1 = f_in.carrier1 - e.omega_c, s2 = f_in.carrier2 - e.omega_t;
  const double cc = std::sqrt(e.gamma_c / (2 * kPi)), ct = std::sqrt(e.gamma_t / (2 * kPi));
  const auto& w1 = f_in.axis1.weights();
  const auto& w2 = f_in.axis2.weights();
  std::vector<double> d1(n1), d2(n2);
  for (std::size_t i = 0; i < n1; ++i) d1[i] = f_in.axis1.node(i) + s1;
  for (std::size_t j = 0; j < n2; ++j) d2[j] = f_in.axis2.node(j) + s2;

  using State = std::vector<cplx>;
  SystemTrajectory tr;
  std::size_t evals = 0;
  std::vector<cplx> e1(n1), e2(n2);

  // state = [f (row-major) | g | s]
  auto rhs = [&](const State& x, State& dx, double t) {
    ++evals;
    for (std::size_t i = 0; i < n1; ++i) e1[i] = std::polar(1.0, d1[i] * t);
    for (std::size_t j = 0; j < n2; ++j) e2[j] = std::polar(1.0, d2[j] * t);
    const cplx* f = x.data();
    const cplx* g = f + nf;
    const cplx s = x[nf + n2];
    cplx* df = dx.data();
    cplx* dg = df + nf;
    std::fill(dx.begin(), dx.end(), cplx(0));
    for (std::size_t i = 0; i < n1; ++i) {
      kernels::caxpy(n2, -cc * e1[i], g, df + i * n2);
      kernels::caxpy(n2, cc * w1[i] * std::conj(e1[i]), f + i * n2, dg);
    }
    cplx ds = 0;
    for (std::size_t j = 0; j < n2; ++j) {
      dg[j] -= ct * s * e2[j];
      ds += w2[j] * std::conj(e2[j]) * g[j];
    }
    dx[nf + n2] = ct * ds;
  };

  State x(nf + n2 + 1, cplx(0));
  std::copy(f_in.values.begin(), f_in.values.end(), x.begin());

  auto populations = [&](const State& y, double& pf, double& pe1, double& pe2) {
    pf = 0;
    for (std::size_t i = 0; i < n1; ++i) pf += w1[i] * kernels::wnorm2(n2, w2.data(), y.data() + i * n2);
    pe1 = kernels::wnorm2(n2, w2.data(), y.data() + nf);
    pe2 = std::norm(y[nf + n2]);
  };
  double pf0, pe10, pe20;
  populations(x, pf0, pe10, pe20);
  const double n0 = pf0 + pe10 + pe20;

  std::vector<double> times(control.samples);
  for (std::size_t k = 0; k < control.samples; ++k)
    times[k] = t_start + (t_end - t_start) * static_cast<double>(k) / (control.samples - 1);

  auto observer = [&](const State& y, double t) {
    double pf, pe1, pe2;
    populations(y, pf, pe1, pe2);
    const double drift = std::abs(pf + pe1 + pe2 - n0);
    tr.max_norm_drift = std::max(tr.max_norm_drift, drift);
    if (drift > control.norm_tolerance)
      throw IntegratorFailure("norm drift " + std::to_string(drift) + " at t = " + std::to_string(t) +
                              " exceeds tolerance; reduce the step or tolerances");
    tr.times.push_back(t);
    tr.p_field.push_back(pf);
    tr.p_e1.push_back(pe1);
    tr.p_e2.push_back(pe2);
    tr.s_values.push_back(y[nf + n2]);
    if (control.store_fields) {
      AmplitudeGrid fg(f_in.axis1, f_in.axis2, f_in.carrier1, f_in.carrier2);
      std::copy(y.begin(), y.begin() + nf, fg.values.begin());
      tr.f_grids.push_back(std::move(fg));
      tr.g_vectors.emplace_back(y.begin() + nf, y.begin() + nf + n2);
    }
  };

  namespace ode = boost::numeric::odeint;
  if (control.adaptive) {
    auto stepper = ode::make_dense_output(control.abs_tol, control.rel_tol, ode::runge_kutta_dopri5<State>());
    const double h0 = std::min(0.01 * (t_end - t_start), control.fixed_step > 0 ? control.fixed_step : 1e-2);
    ode::integrate_times(stepper, rhs, x, times.begin(), times.end(), h0, observer);
  } else {
    ode::runge_kutta4<State> stepper;
    ode::integrate_times(stepper, rhs, x, times.begin(), times.end(), control.fixed_step, observer);
  }

  for (const auto& v : x)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw IntegratorFailure("non-finite state in evolve");
  tr.final_f = AmplitudeGrid(f_in.axis1, f_in.axis2, f_in.carrier1, f_in.carrier2);
  std::copy(x.begin(), x.begin() + nf, tr.final_f.values.begin());
  tr.final_g.assign(x.begin() + nf, x.begin() + nf + n2);
  tr.rhs_evaluations = evals;
  return tr;
}

AmplitudeGrid extract_output(const SystemTrajectory& traj, double residual_tolerance) {
  if (traj.times.empty()) throw InvalidParameter("empty trajectory");
  const double rg = std::sqrt(std::max(0.0, traj.p_e1.back()));
  const double rs = std::abs(traj.s_values.back());
  if (rg > residual_tolerance || rs > residual_tolerance)
    throw IncompleteScattering("emitter not decayed at t_end (|g| = " + std::to_string(rg) +
                                   ", |s| = " + std::to_string(rs) + "); extend the time window",
                               rg, rs);
  return traj.final_f;
}

std::vector<PopulationSample> population_trace(const SystemTrajectory& traj) {
  std::vector<PopulationSample> out;
  out.reserve(traj.times.size());
  for (std::size_t k = 0; k < traj.times.size(); ++k)
    out.push_back({traj.times[k], traj.p_field[k], traj.p_e1[k], traj.p_e2[k]});
  return out;
}

}  // namespace ladder
