#include "ladder/metrics.hpp"

#include <cmath>

namespace ladder {

void GateOperatingPoint::validate() const {
  for (double v : {sigma_t, gamma_c, gamma_t})
    if (!(v > 0) || !std::isfinite(v)) throw InvalidParameter("operating point rates must be positive and finite");
  if (!std::isfinite(delta_t)) throw InvalidParameter("delta_t must be finite");
}

GateOperatingPoint GateOperatingPoint::from_ratios(double sigma_over_gc, double gt_over_sigma, double delta_t,
                                                   double gamma_t) {
  GateOperatingPoint p;
  p.gamma_t = gamma_t;
  p.sigma_t = gamma_t / gt_over_sigma;
  p.gamma_c = p.sigma_t / sigma_over_gc;
  p.delta_t = delta_t;
  p.validate();
  return p;
}

cplx z2_closed_form(const GateOperatingPoint& p) {
  p.validate();
  const double a = 1 + p.gamma_c / p.sigma_t;
  const cplx b(1 + (p.gamma_c + p.sigma_t) / p.gamma_t, -p.delta_t / (0.5 * p.gamma_t));
  return -2.0 / (a * b);
}

double fidelity_analytic(const GateOperatingPoint& p) { return 0.75 + 0.25 * std::abs(1.0 + z2_closed_form(p)); }

double phase_analytic(const GateOperatingPoint& p) { return wrap_phase(std::arg(1.0 + z2_closed_form(p))); }

double conditional_phase_ideal(double delta_t, double gamma_t) {
  if (!(gamma_t > 0)) throw InvalidParameter("gamma_t must be positive");
  return wrap_phase(kPi + 2 * std::atan(2 * delta_t / gamma_t));
}

cplx overlap_Z(const AmplitudeGrid& f_out, const Spectrum& control_ideal, const Spectrum& target_ideal) {
  const std::size_t n1 = f_out.n1(), n2 = f_out.n2();
  std::vector<cplx> t(n2);
  for (std::size_t j = 0; j < n2; ++j)
    t[j] = f_out.axis2.weight(j) * std::conj(target_ideal(f_out.carrier2 + f_out.axis2.node(j)));
  cplx z = 0;
  for (std::size_t i = 0; i < n1; ++i) {
    cplx r = 0;
    for (std::size_t j = 0; j < n2; ++j) r += t[j] * f_out.at(i, j);
    z += f_out.axis1.weight(i) * std::conj(control_ideal(f_out.carrier1 + f_out.axis1.node(i))) * r;
  }
  return z;
}

cplx overlap_Z(const AmplitudeGrid& f_out, const AmplitudeGrid& reference) {
  if (!f_out.compatible(reference)) throw InvalidParameter("overlap_Z: grid layouts differ");
  return reference.inner(f_out);
}

namespace {

struct BasisRun {
  cplx overlap;
  double budget;
};

}  // namespace

GateReport gate_report(const EmitterParams& e, const QubitEncoding& enc, const GatePackets& packets,
                       BackendMethod method, const GateOptions& opt) {
  e.validate();
  enc.validate(e);
  if (!(packets.control_width > 0) || !(packets.target_width > 0))
    throw InvalidParameter("packet widths must be positive");

  GateReport rep;
  rep.method = method;

  if (method == BackendMethod::AnalyticClosedForm) {
    if (std::abs(packets.control_width - e.gamma_c) > 1e-12 * e.gamma_c)
      throw InvalidParameter("the closed form requires a control width equal to gamma_c");
    GateOperatingPoint p{packets.target_width, e.gamma_c, e.gamma_t, enc.target_one_offset};
    const cplx z = 1.0 + z2_closed_form(p);
    rep.overlaps[0] = rep.overlaps[1] = rep.overlaps[2] = 1.0;
    rep.overlaps[3] = z;
    rep.fidelity = 0.75 + 0.25 * std::abs(z);
    rep.fidelity_dominant = rep.fidelity;
    rep.phase = wrap_phase(std::arg(z));
    return rep;
  }

  auto run = [&](int cbit, int tbit) -> BasisRun {
    const PhotonPacket control{e.omega_c + (cbit ? enc.control_one_offset : enc.control_zero_offset),
                               packets.control_width};
    const PhotonPacket target{e.omega_t + (tbit ? enc.target_one_offset : enc.target_zero_offset),
                              packets.target_width};
    GridSpec spec = default_grid_spec(e, control, target, opt.n1, opt.n2, opt.span_factor);
    spec.truncation_budget = opt.scatter.truncation_budget;
    const AmplitudeGrid in = build_input_grid(control, target, spec);
    AmplitudeGrid out;
    double budget = 0;
    switch (method) {
      case BackendMethod::SMatrixQuadrature: {
        ScatterDiagnostics d;
        out = scatter_exact(in, e, opt.scatter, &d);
        budget = std::sqrt(d.neglected_mass) + d.quadrature_error;
        break;
      }
      case BackendMethod::MarkovApprox:
        out = scatter_markov_approx(in, e, control.center);
        break;
      case BackendMethod::Resonant:
        if (cbit) {
          out = scatter_resonant(in, e, target.center - e.omega_t);
        } else {
          // control not absorbed: only its own reflection factor applies
          EmitterParams ec = e;
          ec.gamma_t = 0;
          out = scatter_exact(in, ec, opt.scatter);
        }
        break;
      case BackendMethod::TimeDomainOracle: {
        const ArrivalResult a = evolve_arrival(in, e, opt.arrival);
        out = a.output;
        budget = a.max_norm_drift + a.residual_g + a.residual_s;
        break;
      }
      default:
        throw InvalidParameter("unsupported gate backend");
    }
    budget += std::abs(out.norm2() - in.norm2());
    // Ideal outputs: identity for |0_C>, mirrored control with the input
    // target for |1_C> (the |11> phase is measured against it).
    cplx ov;
    if (!cbit) {
      ov = in.inner(out) / in.norm2();
    } else {
      const MirroredPacket mc = mirrored_control_packet(control);
      const AmplitudeGrid ideal = product_grid(
          in.axis1, in.axis2, in.carrier1, in.carrier2, [&](double d) { return mc(in.carrier1 + d); },
          [&](double d) { return target.amplitude(in.carrier2 + d); });
      ov = ideal.inner(out) / std::sqrt(ideal.norm2() * in.norm2());
    }
    if (!std::isfinite(ov.real()) || !std::isfinite(ov.imag())) throw NumericalError("non-finite overlap");
    if (std::abs(ov) > 1 + opt.consistency_tol)
      throw NumericalError("overlap magnitude " + std::to_string(std::abs(ov)) + " exceeds 1 beyond tolerance");
    return {ov, budget};
  };

  const int bits[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  for (int b = 0; b < 4; ++b) {
    const BasisRun r = run(bits[b][0], bits[b][1]);
    rep.overlaps[b] = r.overlap;
    rep.error_budget = std::max(rep.error_budget, r.budget);
  }
  const cplx o10 = rep.overlaps[2], o11 = rep.overlaps[3];
  const cplx sum = rep.overlaps[0] + rep.overlaps[1] + o10 + std::abs(o11) * std::polar(1.0, std::arg(o10));
  rep.fidelity = 0.25 * std::abs(sum);
  rep.fidelity_dominant = 0.75 + 0.25 * std::abs(o11);
  rep.phase = wrap_phase(std::arg(o11 / o10));
  return rep;
}

}  // namespace ladder
