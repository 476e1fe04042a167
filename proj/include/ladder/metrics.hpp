#pragma once

#include <functional>

#include "ladder/dynamics.hpp"
#include "ladder/model.hpp"
#include "ladder/smatrix.hpp"

namespace ladder {

// sigma_c is pinned to gamma_c (Lorentzian control matched to the transition).
struct GateOperatingPoint {
  double sigma_t = 1e-3;
  double gamma_c = 1e-6;
  double gamma_t = 1.0;
  double delta_t = 0.0;

  void validate() const;
  // sigma_t / gamma_c = gamma_t / sigma_t = ratio, with gamma_t = 1.
  static GateOperatingPoint from_ratios(double sigma_over_gc, double gt_over_sigma, double delta_t = 0.0,
                                        double gamma_t = 1.0);
};

// Z2 = -2 / ((1 + Gc/sT)(1 + (Gc + sT)/Gt - i Dt/(Gt/2)))
cplx z2_closed_form(const GateOperatingPoint& p);
double fidelity_analytic(const GateOperatingPoint& p);
double phase_analytic(const GateOperatingPoint& p);
// pi + 2 atan(2 Dt / Gt), wrapped to (-pi, pi]
double conditional_phase_ideal(double delta_t, double gamma_t);

using Spectrum = std::function<cplx(double)>;  // absolute frequency -> amplitude

// sum w1 w2 conj(a_c(k1) a_t(k2)) f_out(k1, k2)
cplx overlap_Z(const AmplitudeGrid& f_out, const Spectrum& control_ideal, const Spectrum& target_ideal);
// Same against a reference grid; throws InvalidParameter on a layout mismatch.
cplx overlap_Z(const AmplitudeGrid& f_out, const AmplitudeGrid& reference);

struct GatePackets {
  double control_width = 1e-6;  // sigma_C
  double target_width = 1e-3;   // sigma_T
};

struct GateOptions {
  std::size_t n1 = 384, n2 = 384;
  double span_factor = 40.0;
  ScatterOptions scatter;
  ArrivalOptions arrival;
  double consistency_tol = 1e-3;
};

GateReport gate_report(const EmitterParams& e, const QubitEncoding& enc, const GatePackets& packets,
                       BackendMethod method, const GateOptions& opt = {});

}  // namespace ladder
