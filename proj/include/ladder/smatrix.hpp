#pragma once

#include "ladder/model.hpp"

namespace ladder {

enum class ScatterTier { ExactEq3, MarkovApproxEq5, ResonantEq6 };

struct ScatterOptions {
  double rel_tol = 1e-8;             // Gauss-Kronrod tolerance per panel
  unsigned max_depth = 4;            // adaptive bisections per panel
  std::size_t s_oversample = 4;      // anti-diagonal table size per grid point
  double truncation_budget = 1e-2;   // allowed neglected out-of-window mass
  unsigned threads = 0;              // 0: worker_count()
};

struct ScatterDiagnostics {
  double neglected_mass = 0;   // estimated norm^2 of contributions outside the window
  double quadrature_error = 0; // Gauss-Kronrod error estimate, in the same norm
};

// Exact two-photon scattering. Offsets are taken relative to the emitter
// transitions, so grids may use any carriers.
AmplitudeGrid scatter_exact(const AmplitudeGrid& f_in, const EmitterParams& e,
                            const ScatterOptions& opt = {}, ScatterDiagnostics* diag = nullptr);

// Approximate S-matrix (Markov step on the control); requires a product input.
AmplitudeGrid scatter_markov_approx(const AmplitudeGrid& f_in, const EmitterParams& e,
                                    double control_center, double separability_tol = 1e-8);

// Resonant-control, narrow-band limit: a pointwise unimodular map.
AmplitudeGrid scatter_resonant(const AmplitudeGrid& f_in, const EmitterParams& e, double delta_t);

AmplitudeGrid scatter(ScatterTier tier, const AmplitudeGrid& f_in, const EmitterParams& e,
                      double control_center, double delta_t, const ScatterOptions& opt = {},
                      ScatterDiagnostics* diag = nullptr);

// -(gamma_c/2 + i d)/(gamma_c/2 - i d): the reflection factor of the control.
cplx control_reflection(double d, double gamma_c);
// -(1 + i D/(G/2))/(1 - i D/(G/2))
cplx target_resonant_factor(double delta_t, double gamma_t);

// Ideal control output -sqrt(w/2pi)/(w/2 - i(k - center)).
struct MirroredPacket {
  double center;
  double width;
  cplx operator()(double k) const;
};
MirroredPacket mirrored_control_packet(const PhotonPacket& control);

}  // namespace ladder
