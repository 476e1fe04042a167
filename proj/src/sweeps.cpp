#include "ladder/sweeps.hpp"

#include <boost/math/tools/roots.hpp>
#include <chrono>
#include <cmath>
#include <ctime>

#include "ladder/parallel.hpp"

namespace ladder {

const char* to_string(SweepMethod m) {
  switch (m) {
    case SweepMethod::Analytic: return "analytic";
    case SweepMethod::Exact: return "exact";
    case SweepMethod::Markov: return "markov";
    case SweepMethod::Oracle: return "oracle";
  }
  return "unknown";
}

namespace {

bool known_parameter(const std::string& p) {
  return p == "sigma_t/gamma_c" || p == "gamma_t/sigma_t" || p == "ratio" || p == "delta_t/gamma_t" ||
         p == "gamma_t";
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void SweepAxis::validate() const {
  if (!known_parameter(parameter)) throw InvalidParameter("unknown sweep parameter '" + parameter + "'");
  if (points < 2) throw InvalidParameter("sweep axis '" + parameter + "' needs at least 2 points");
  if (!(min < max)) throw InvalidParameter("sweep axis '" + parameter + "' requires min < max");
  if (scale == AxisScale::Log && !(min > 0)) throw InvalidParameter("log axis '" + parameter + "' needs positive bounds");
}

std::vector<double> SweepAxis::values() const {
  validate();
  std::vector<double> v(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double t = static_cast<double>(k) / (points - 1);
    v[k] = scale == AxisScale::Log ? std::exp(std::log(min) + t * (std::log(max) - std::log(min)))
                                   : min + t * (max - min);
  }
  v.front() = min;
  v.back() = max;
  return v;
}

void SweepSpec::validate() const {
  if (axes.empty()) throw InvalidParameter("sweep needs at least one axis");
  for (const auto& a : axes) a.validate();
  baseline.validate();
}

GateOperatingPoint apply_axes(const GateOperatingPoint& base, const std::vector<SweepAxis>& axes,
                              const std::vector<double>& coords) {
  double gt = base.gamma_t;
  double r1 = base.sigma_t / base.gamma_c, r2 = base.gamma_t / base.sigma_t;
  double dn = base.delta_t / base.gamma_t;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    const std::string& p = axes[k].parameter;
    const double v = coords.at(k);
    if (p == "sigma_t/gamma_c") r1 = v;
    else if (p == "gamma_t/sigma_t") r2 = v;
    else if (p == "ratio") r1 = r2 = v;
    else if (p == "delta_t/gamma_t") dn = v;
    else if (p == "gamma_t") gt = v;
    else throw InvalidParameter("unknown sweep parameter '" + p + "'");
  }
  return GateOperatingPoint::from_ratios(r1, r2, dn * gt, gt);
}

std::vector<double> unwrap_lag(const std::vector<double>& principal) {
  std::vector<double> out(principal.size());
  for (std::size_t k = 0; k < principal.size(); ++k) {
    if (k == 0) {
      out[0] = principal[0] >= kPi ? principal[0] - 2 * kPi : principal[0];
      if (out[0] < -kPi) out[0] += 2 * kPi;
    } else {
      out[k] = out[k - 1] + wrap_phase(principal[k] - principal[k - 1]);
    }
  }
  return out;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult res;
  res.axes = spec.axes;
  res.method = to_string(spec.method);
  res.started = utc_now();
  std::size_t total = 1;
  for (const auto& a : spec.axes) {
    res.grids.push_back(a.values());
    total *= a.points;
  }
  res.points.resize(total);
  const std::size_t nd = spec.axes.size();

  auto eval = [&](std::size_t idx) {
    SweepPoint& pt = res.points[idx];
    pt.coords.resize(nd);
    std::size_t rem = idx;
    for (std::size_t k = nd; k-- > 0;) {
      pt.coords[k] = res.grids[k][rem % spec.axes[k].points];
      rem /= spec.axes[k].points;
    }
    try {
      pt.point = apply_axes(spec.baseline, spec.axes, pt.coords);
      if (spec.method == SweepMethod::Analytic) {
        const cplx z = 1.0 + z2_closed_form(pt.point);
        pt.fidelity = pt.fidelity_coherent = 0.75 + 0.25 * std::abs(z);
        pt.phase = wrap_phase(std::arg(z));
        pt.overlaps = {1.0, 1.0, 1.0, z};
      } else {
        EmitterParams e;
        e.gamma_c = pt.point.gamma_c;
        e.gamma_t = pt.point.gamma_t;
        const QubitEncoding enc = QubitEncoding::standard(e, pt.point.delta_t);
        const BackendMethod m = spec.method == SweepMethod::Exact    ? BackendMethod::SMatrixQuadrature
                                : spec.method == SweepMethod::Markov ? BackendMethod::MarkovApprox
                                                                     : BackendMethod::TimeDomainOracle;
        const GateReport r = gate_report(e, enc, {pt.point.gamma_c, pt.point.sigma_t}, m, spec.numeric);
        pt.fidelity = r.fidelity_dominant;
        pt.fidelity_coherent = r.fidelity;
        pt.phase = r.phase;
        for (int b = 0; b < 4; ++b) pt.overlaps[b] = r.overlaps[b];
        pt.error_estimate = r.error_budget;
      }
    } catch (const std::exception& ex) {
      pt.ok = false;
      pt.error = ex.what();
      pt.fidelity = pt.fidelity_coherent = pt.phase = std::nan("");
    }
  };
  // Numerical points are internally parallel already.
  parallel_for(total, eval, spec.method == SweepMethod::Analytic ? spec.threads : 1u);

  const std::size_t line = spec.axes.back().points;
  for (std::size_t s = 0; s < total; s += line) {
    std::vector<double> pr(line);
    for (std::size_t k = 0; k < line; ++k) pr[k] = res.points[s + k].phase;
    const auto uw = unwrap_lag(pr);
    for (std::size_t k = 0; k < line; ++k) res.points[s + k].phase_unwrapped = uw[k];
  }
  res.finished = utc_now();
  return res;
}

SweepSpec fidelity_contour_spec(std::size_t points, SweepMethod method) {
  SweepSpec s;
  s.axes = {{"sigma_t/gamma_c", AxisScale::Log, 10.0, 1e3, points}, {"gamma_t/sigma_t", AxisScale::Log, 10.0, 1e3, points}};
  s.baseline = GateOperatingPoint::from_ratios(1e3, 1e3);
  s.method = method;
  return s;
}

SweepResult fidelity_contour(const SweepSpec& spec) {
  if (spec.axes.size() != 2) throw InvalidParameter("fidelity contour needs exactly two axes");
  return run_sweep(spec);
}

SweepSpec detuning_sweep_spec(double ratio, std::size_t points, SweepMethod method) {
  SweepSpec s;
  s.axes = {{"delta_t/gamma_t", AxisScale::Linear, 0.0, 4.0, points}};
  s.baseline = GateOperatingPoint::from_ratios(ratio, ratio);
  s.method = method;
  return s;
}

SweepResult detuning_sweep(const SweepSpec& spec) {
  if (spec.axes.size() != 1) throw InvalidParameter("detuning sweep needs exactly one axis");
  return run_sweep(spec);
}

double phase_lag(const GateOperatingPoint& p) {
  const double a = std::arg(1.0 + z2_closed_form(p));
  return a >= kPi ? a - 2 * kPi : a;
}

TuneResult tune_detuning(double phi_target, const GateOperatingPoint& p) {
  p.validate();
  GateOperatingPoint q = p;
  auto lag = [&](double d) {
    q.delta_t = d;
    return phase_lag(q);
  };
  const double lo = lag(0.0);
  if (!(phi_target >= lo && phi_target < 0))
    throw NoSolution("target phase " + std::to_string(phi_target) + " outside achievable interval [" +
                         std::to_string(lo) + ", 0)",
                     lo, 0.0);
  TuneResult r;
  if (phi_target == lo) {
    r.delta_t = 0;
  } else {
    double hi = p.gamma_t;
    while (lag(hi) < phi_target) {
      hi *= 2;
      if (hi > 1e12 * p.gamma_t) throw NoSolution("target phase not bracketed", lo, 0.0);
    }
    auto f = [&](double d) { return lag(d) - phi_target; };
    std::uintmax_t iters = 200;
    const auto br = boost::math::tools::toms748_solve(f, 0.0, hi, f(0.0), f(hi),
                                                      boost::math::tools::eps_tolerance<double>(50), iters);
    r.delta_t = 0.5 * (br.first + br.second);
    r.iterations = iters;
  }
  q.delta_t = r.delta_t;
  r.phase = phase_lag(q);
  r.fidelity = fidelity_analytic(q);
  return r;
}

}  // namespace ladder
